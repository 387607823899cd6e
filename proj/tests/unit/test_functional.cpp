#include <doctest.h>

#include "choquard/error.hpp"
#include "choquard/functional.hpp"
#include "choquard/riesz.hpp"

#include <cmath>

using namespace choquard;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi), fm = f(mid);
    if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

RadialField gaussian(int N, double width = 1.0, double amp = 1.0) {
  auto g = make_grid(N, 12.0, 600, 2.0);
  return RadialField::from_function(g, [&](double r) { return amp * std::exp(-r * r / (width * width)); });
}

} // namespace

TEST_CASE("zero field has zero parts") {
  auto u = RadialField::zeros(make_grid(3, 5.0, 100));
  const auto prm = ProblemParams::lambda_problem(3, 1.0, 2.0, 3.0, 1.0);
  const auto e = energy_breakdown(prm, u);
  CHECK(e.kinetic == 0.0);
  CHECK(e.mass == 0.0);
  CHECK(e.riesz == 0.0);
  CHECK(e.power == 0.0);
  CHECK(e.total == 0.0);
  CHECK_THROWS_AS(stationarity_defects(prm, u), Error);
  CHECK_THROWS_AS(nehari_project(prm, u), Error);
}

TEST_CASE("mode coefficients") {
  const Parts s{1, 1, 1, 1};
  const auto lam = ProblemParams::lambda_problem(3, 1.0, 2.0, 3.0, 1.0);
  CHECK(total_energy(lam, s) == doctest::Approx(5.0 / 12.0).epsilon(1e-14));

  // HLS-critical normalized energy: K/2 - R/(2 p) - nu P / q, no mass term.
  const double nu = 0.3;
  const auto nrm = ProblemParams::normalized(3, 1.0, 3.0, nu, 1.0, CriticalTerm::Hls);
  CHECK(nrm.p == doctest::Approx(4.0));
  const Parts t{2.0, 7.0, 0.5, 1.5};
  CHECK(total_energy(nrm, t) == doctest::Approx(1.0 - 0.5 / 8.0 - nu * 1.5 / 3.0).epsilon(1e-14));

  const auto sob = ProblemParams::normalized(3, 1.0, 2.0, nu, 1.0, CriticalTerm::Sobolev);
  CHECK(sob.q == doctest::Approx(6.0));
  CHECK(total_energy(sob, t) == doctest::Approx(1.0 - nu * 0.5 / 4.0 - 1.5 / 6.0).epsilon(1e-14));

  const auto mu = ProblemParams::mu_problem(4, 1.0, 1.4, 3.0, 0.2);
  CHECK(total_energy(mu, t) == doctest::Approx(1.0 + 3.5 - 0.2 * 0.5 / 2.8 - 1.5 / 3.0).epsilon(1e-14));
}

TEST_CASE("total reconstructs from the computed parts") {
  const auto u = gaussian(3);
  const auto prm = ProblemParams::general(3, 1.0, 2.0, 3.0, 0.7, 1.3);
  const auto e = energy_breakdown(prm, u);
  const double rebuilt = 0.5 * e.kinetic + 0.5 * e.mass - 0.7 * e.riesz / 4.0 - 1.3 * e.power / 3.0;
  CHECK(std::abs(e.total - rebuilt) <= 1e-12 * std::abs(rebuilt));
  CHECK(e.riesz > 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ProblemParams::lambda_problem(3, 1.0, 1.2, 3.0, 1.0), Error); // p below (N+a)/N
  CHECK_THROWS_AS(ProblemParams::lambda_problem(3, 1.0, 2.0, 6.5, 1.0), Error);
  CHECK_THROWS_AS(ProblemParams::lambda_problem(3, 3.0, 2.0, 3.0, 1.0), Error);
  CHECK_THROWS_AS(ProblemParams::general(3, 1.0, 2.0, 3.0, 0.0, 0.0), Error);
  CHECK_NOTHROW(ProblemParams::general(3, 1.0, 2.0, 3.0, 0.0, 1.0));
  CHECK(mode_from_string(to_string(Mode::Mu)) == Mode::Mu);
  CHECK_THROWS_AS(mode_from_string("bogus"), Error);
  const auto prm = ProblemParams::lambda_problem(3, 1.0, 2.0, 3.0, 1.0);
  CHECK_THROWS_AS(compute_parts(prm, gaussian(4)), Error);
}

TEST_CASE("nehari defect scales as the explicit power laws") {
  const auto prm = ProblemParams::general(3, 1.0, 2.0, 3.0, 0.0, 1.0);
  const auto u = gaussian(3);
  const Parts s = compute_parts(prm, u);
  const auto d = stationarity_defects(prm, u.scaled(2.0));
  CHECK(d.nehari == doctest::Approx(4 * s.K + 4 * s.M - 8.0 * s.P).epsilon(1e-10));
  // Small amplitude: quadratic part dominates.
  CHECK(stationarity_defects(prm, u.scaled(1e-3)).nehari > 0.0);
}

TEST_CASE("nehari root closed forms and bisection oracle") {
  // Local only.
  CHECK(nehari_root(3.0, 0.0, 3.0, 2.0, 3.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nehari_root(5.0, 0.0, 2.0, 2.0, 4.0) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  // Choquard only.
  CHECK(nehari_root(4.0, 1.0, 0.0, 2.0, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  // 2 t^2 = t^4 + t^3: oracle by plain bisection.
  const double oracle = bisect([](double t) { return t * t + t - 2.0; }, 0.5, 1.5);
  CHECK(nehari_root(2.0, 1.0, 1.0, 2.0, 3.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-12));
  const double o2 = bisect([](double t) { return std::pow(t, 0.8) + 0.3 * std::pow(t, 1.5) - 7.0; }, 0.1, 100);
  CHECK(nehari_root(7.0, 1.0, 0.3, 1.4, 3.5) == doctest::Approx(o2).epsilon(1e-11));
  CHECK_THROWS_AS(nehari_root(1.0, 0.0, 0.0, 2.0, 3.0), Error);
}

TEST_CASE("projection lands on the manifold at the fiber maximum") {
  const auto prm = ProblemParams::general(3, 1.0, 2.0, 3.0, 0.5, 0.8);
  const auto u = gaussian(3, 1.3, 0.2);
  const auto pr = nehari_project(prm, u);
  CHECK(std::abs(stationarity_defects(prm, pr.field).nehari_rel) < 1e-10);
  const Parts s = compute_parts(prm, u);
  auto e = [&](double t) { return total_energy(prm, scale_parts(prm, s, FiberKind::Nehari, t)); };
  const double t = pr.t_star, h = 1e-4 * t;
  CHECK(std::abs(e(t + h) - e(t - h)) / (2 * h) < 1e-6 * std::abs(e(t)) / t);
  CHECK(e(t + h) - 2 * e(t) + e(t - h) < 0.0);
}

TEST_CASE("fiber scaling laws") {
  const auto prm = ProblemParams::lambda_problem(3, 1.0, 2.0, 3.0, 1.0);
  const auto u = gaussian(3);
  const Parts s = compute_parts(prm, u);
  std::vector<double> ts;
  for (int i = 0; i < 50; ++i) ts.push_back(0.1 * std::pow(1.1, i));
  const auto fm = fiber_profile(prm, u, FiberKind::MassPreserving, ts);
  for (const auto& p : fm.parts) CHECK(std::abs(p.M - s.M) <= 1e-12 * s.M);
  const auto fd = fiber_profile(prm, u, FiberKind::Dilation, {1.0});
  CHECK(fd.energy[0] == doctest::Approx(energy_breakdown(prm, u).total).epsilon(1e-14));
  CHECK_THROWS_AS(fiber_profile(prm, u, FiberKind::Nehari, {}), Error);
  CHECK(fiber_kind_from_string("mass") == FiberKind::MassPreserving);

  // Mass-preserving fiber of the HLS-critical normalized energy: exponents 2, 2*2_a^*, q gamma_q.
  const auto nrm = ProblemParams::normalized(3, 1.0, 3.0, 0.4, 1.0, CriticalTerm::Hls);
  const Parts b{1.5, 1.0, 0.7, 0.9};
  for (double t : {0.3, 1.0, 2.7}) {
    const double expect = 0.5 * t * t * 1.5 - std::pow(t, 8.0) * 0.7 / 8.0 - 0.4 * std::pow(t, 1.5) * 0.9 / 3.0;
    CHECK(total_energy(nrm, scale_parts(nrm, b, FiberKind::MassPreserving, t)) ==
          doctest::Approx(expect).epsilon(1e-13));
  }

  // Nehari fiber maximum recorded as a critical index with negative curvature.
  const auto fn = fiber_profile(prm, u, FiberKind::Nehari, ts);
  REQUIRE(fn.critical.size() == 1);
  CHECK(fn.curvature[0] == -1);
}

TEST_CASE("mass-preserving dilation is exact on the rescaled grid") {
  const auto u = gaussian(3);
  const auto v = mass_preserving_dilate(u, 1.7);
  CHECK(mass(v) == doctest::Approx(mass(u)).epsilon(1e-12));
  CHECK(gradient_seminorm(v) == doctest::Approx(1.7 * 1.7 * gradient_seminorm(u)).epsilon(1e-12));
  CHECK(lp_norm_pow(v, 3.0) == doctest::Approx(std::pow(1.7, 1.5) * lp_norm_pow(u, 3.0)).epsilon(1e-12));
}

TEST_CASE("mass fiber classification") {
  // Small nu: local min at negative level, then the mountain-pass maximum.
  const auto nrm = ProblemParams::normalized(3, 1.0, 3.0, 0.05, 1.0, CriticalTerm::Hls);
  const Parts b{1.0, 1.0, 1.0, 1.0};
  const auto c = mass_fiber_classify_parts(nrm, b);
  REQUIRE(c.points.size() == 2);
  REQUIRE(c.plus);
  REQUIRE(c.minus);
  CHECK(c.plus->t < c.minus->t);
  CHECK(c.plus->energy < 0.0);
  CHECK(c.minus->energy > 0.0);
  // Oracle: dense scan of the fiber energy for its interior minimum and maximum.
  auto psi = [&](double t) { return total_energy(nrm, scale_parts(nrm, b, FiberKind::MassPreserving, t)); };
  double best_min = 1e300, best_max = -1e300, tmin = 0, tmax = 0;
  for (int i = 1; i < 200000; ++i) {
    const double t = 2.0 * i / 200000;
    const double v = psi(t);
    if (t < 0.5 && v < best_min) best_min = v, tmin = t;
    if (t > 0.5 && v > best_max) best_max = v, tmax = t;
  }
  CHECK(c.plus->t == doctest::Approx(tmin).epsilon(1e-4));
  CHECK(c.minus->t == doctest::Approx(tmax).epsilon(1e-4));

  // Pure critical term: a single maximum.
  const auto pure = ProblemParams::normalized(3, 1.0, 3.0, 0.0, 1.0, CriticalTerm::Hls);
  const auto c0 = mass_fiber_classify_parts(pure, b);
  REQUIRE(c0.points.size() == 1);
  CHECK(!c0.plus);
  CHECK(c0.points[0].branch == Branch::Minus);

  // Degenerate point: the two branches merge when the fiber has an inflection
  // critical point. Tune nu so that Psi' and Psi'' vanish together.
  // With K=R=P=1, f(t) = t^2 - t^8 - 0.5 nu t^1.5; f = t f' = 0 gives t^6 = 0.5/6.5.
  auto degenerate_nu = [] {
    const double t = std::pow(0.5 / 6.5, 1.0 / 6.0);
    return (t * t - std::pow(t, 8.0)) / (0.5 * std::pow(t, 1.5));
  };
  const double nu0 = degenerate_nu();
  auto nz = ProblemParams::normalized(3, 1.0, 3.0, nu0, 1.0, CriticalTerm::Hls);
  const auto cz = mass_fiber_classify_parts(nz, b);
  bool has_zero = false;
  for (const auto& p : cz.points) has_zero |= p.branch == Branch::Zero;
  CHECK((has_zero || cz.points.empty()));
  auto nbig = ProblemParams::normalized(3, 1.0, 3.0, 1.1 * nu0, 1.0, CriticalTerm::Hls);
  CHECK(mass_fiber_classify_parts(nbig, b).points.empty());

  // Off the mass sphere.
  CHECK_THROWS_AS(mass_fiber_classify(nrm, gaussian(3)), Error);
  const auto g = gaussian(3);
  const auto on = g.scaled(1.0 / std::sqrt(mass(g)));
  CHECK_NOTHROW(mass_fiber_classify(nrm, on));
}
