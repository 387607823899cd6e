#include <doctest.h>

#include "choquard/error.hpp"
#include "choquard/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace choquard;
constexpr double pi = std::numbers::pi;

static double ball_volume(int N, double R) {
  return std::pow(pi, 0.5 * N) * std::pow(R, N) / std::tgamma(0.5 * N + 1.0);
}

TEST_CASE("make_grid validates its configuration") {
  CHECK_THROWS_AS(make_grid(3, 1.0, 8, 1.0), Error);
  try {
    make_grid(3, 1.0, 8, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfiguration);
  }
  CHECK_THROWS_AS(make_grid(3, 0.0, 100, 1.0), Error);
  CHECK_THROWS_AS(make_grid(2, 1.0, 100, 1.0), Error);
  CHECK_THROWS_AS(make_grid(3, 1.0, 100, 0.5), Error);
}

TEST_CASE("grid nodes and weights") {
  auto g = make_grid(3, 5.0, 101, 2.0);
  CHECK(g->size() == 102);
  CHECK(g->node(0) == 0.0);
  CHECK(g->node(101) == 5.0);
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->node(i) > g->node(i - 1));
  for (int n : {100, 101, 400})
    for (double gr : {1.0, 2.0, 3.0}) {
      auto h = make_grid(4, 5.0, n, gr);
      for (double w : h->weights()) CHECK(w > 0.0);
    }
  double s = 0;
  for (double w : g->weights()) s += w;
  CHECK(s == doctest::Approx(std::pow(5.0, 3) / 3).epsilon(1e-13));
}

TEST_CASE("integrate reproduces ball volumes") {
  auto g3 = make_grid(3, 1.0, 200, 1.0);
  CHECK(std::abs(integrate(RadialField::from_function(g3, [](double) { return 1.0; })) -
                 ball_volume(3, 1.0)) < 1e-8);
  auto g4 = make_grid(4, 2.0, 400, 2.0);
  CHECK(std::abs(integrate(RadialField::from_function(g4, [](double) { return 1.0; })) -
                 8 * pi * pi) < 1e-8);
  CHECK(integrate(RadialField::zeros(g3)) == 0.0);
}

TEST_CASE("integrate Gaussian and step function") {
  auto g = make_grid(3, 10.0, 400, 1.0);
  const double v = integrate(RadialField::from_function(g, [](double r) { return std::exp(-r * r); }));
  CHECK(std::abs(v - std::pow(pi, 1.5)) < 1e-6);
  // Step at r = 1 on a grid with a node at r = 1 (n multiple of r_max).
  auto gs = make_grid(3, 2.0, 2000, 1.0);
  const double b = integrate(RadialField::from_function(gs, [](double r) { return r <= 1.0 ? 1.0 : 0.0; }));
  CHECK(std::abs(b - 4 * pi / 3) < 5e-3);
}

TEST_CASE("integrate is linear and monotone; grid mismatch rejected") {
  auto g = make_grid(3, 8.0, 300, 2.0);
  auto f = RadialField::from_function(g, [](double r) { return std::exp(-r); });
  auto h = RadialField::from_function(g, [](double r) { return 2 * std::exp(-r); });
  CHECK(integrate(h) == doctest::Approx(2 * integrate(f)).epsilon(1e-14));
  CHECK(integrate(f) <= integrate(h));
  auto other = make_grid(3, 8.0, 302, 2.0);
  CHECK_THROWS_AS(integrate(*other, f), Error);
}

TEST_CASE("radial Laplacian on simple profiles") {
  auto g = make_grid(3, 2.0, 200, 2.0);
  auto r2 = RadialField::from_function(g, [](double r) { return r * r; });
  auto L = apply_radial_laplacian(*g, r2);
  for (std::size_t i = 0; i + 1 < g->size(); ++i) CHECK(std::abs(L[i] - 6.0) < 1e-6);
  auto c = RadialField::from_function(g, [](double) { return 3.5; });
  auto Lc = apply_radial_laplacian(*g, c);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(Lc[i]) < 1e-8);
  auto g4 = make_grid(4, 2.0, 100, 1.0);
  auto L4 = apply_radial_laplacian(*g4, RadialField::from_function(g4, [](double r) { return r * r; }));
  CHECK(std::abs(L4[0] - 8.0) < 1e-8);
  CHECK(std::abs(L4[50] - 8.0) < 1e-8);
}

TEST_CASE("Talenti profile solves the critical equation on a fine grid") {
  auto g = make_grid(3, 20.0, 4000, 1.5);
  auto W = RadialField::from_function(
      g, [](double r) { return std::pow(3.0, 0.25) / std::sqrt(1.0 + r * r); });
  auto L = apply_radial_laplacian(*g, W);
  double worst = 0;
  for (std::size_t i = 0; i + 5 < g->size(); ++i)
    worst = std::max(worst, std::abs(-L[i] - std::pow(W[i], 5)));
  CHECK(worst < 1e-4);
}

TEST_CASE("Green identity for compactly supported profiles") {
  auto g = make_grid(3, 3.0, 1200, 1.0);
  auto bump = [](double r, double R) {
    return r < R ? std::pow(1 - (r / R) * (r / R), 4) : 0.0;
  };
  auto f = RadialField::from_function(g, [&](double r) { return bump(r, 2.0); });
  auto h = RadialField::from_function(g, [&](double r) { return bump(r, 2.5); });
  auto L = apply_radial_laplacian(*g, f);
  const double lhs = -integrate_product(h, L);
  const double rhs = integrate_product(derivative(f), derivative(h));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("interpolation and serialisation") {
  auto g = make_grid(3, 6.0, 200, 2.0);
  auto f = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  for (std::size_t i = 0; i < g->size(); i += 17) CHECK(f.at(g->node(i)) == f[i]);
  CHECK(f.at(0.37) == doctest::Approx(std::exp(-0.37 * 0.37)).epsilon(1e-6));
  CHECK(f.at(7.0) == 0.0);
  CHECK(f.tail_flag());

  std::stringstream ss;
  write_csv(ss, f);
  auto g2 = grid_from_header_json(grid_header_json(*g));
  CHECK(g2->same_as(*g));
  auto back = read_csv(ss, g2);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(back[i] == f[i]);
}
