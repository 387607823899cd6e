#include <doctest.h>

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/testfn.hpp"

#include <cmath>

using namespace choquard;

namespace {

template <class F>
ErrorKind thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

std::vector<double> eps_grid(double hi, double decades, int per_decade) {
  std::vector<double> e;
  const int n = static_cast<int>(std::ceil(decades * per_decade));
  for (int k = 0; k <= n; ++k) e.push_back(hi * std::pow(10.0, -decades * k / n));
  return e;
}

} // namespace

TEST_CASE("cut-off profile") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(1.0) == 1.0);
  CHECK(cutoff_profile(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_profile(2.0) == 0.0);
  CHECK(cutoff_profile(7.0) == 0.0);
  for (double s = 1.0; s < 2.0; s += 0.01) REQUIRE(cutoff_profile(s + 0.01) <= cutoff_profile(s));
  // C^2 joins: first and second differences vanish at both ends.
  const double h = 1e-4;
  CHECK(std::abs(cutoff_profile(1.0 + h) - 1.0) < 1e-10);
  CHECK(std::abs(cutoff_profile(2.0 - h)) < 1e-10);
}

TEST_CASE("bubble construction") {
  const BubbleSpec spec{3, 0.05, 2.0, std::nullopt};
  const auto g = bubble_grid(spec);
  const auto V = bubble(spec, g);
  CHECK(V[0] == doctest::Approx(std::pow(0.05, -0.5) * talenti_value(3, 0.0)).epsilon(1e-14));
  for (std::size_t i = 0; i < g->size(); ++i)
    if (g->node(i) >= 4.0) REQUIRE(V[i] == 0.0);

  // Cut-off inactive on the grid: V = W_eps.
  const auto Vw = bubble({3, 0.5, 50.0, std::nullopt}, make_grid(3, 120.0, 400, 2.0));
  const auto W = talenti_field(Vw.grid_ptr(), 0.5);
  for (std::size_t i = 0; i < Vw.size(); ++i)
    if (Vw.grid().node(i) <= 50.0) REQUIRE(Vw[i] == doctest::Approx(W[i]).epsilon(1e-15));

  CHECK(thrown_kind([&] { bubble({3, 0.05, 0.1, std::nullopt}, g); }) == ErrorKind::InvalidParameter);
  CHECK(thrown_kind([&] { bubble(spec, make_grid(3, 4.4, 20, 1.0)); }) == ErrorKind::Resolution);
  CHECK(thrown_kind([&] { bubble(spec, make_grid(3, 3.0, 4000, 2.0)); }) == ErrorKind::Resolution);
}

TEST_CASE("mass calibration") {
  const double a = 10.0;
  for (double eps : {0.2, 0.05, 0.01}) {
    const double R = mass_radius(3, a, eps);
    CHECK(bubble_mass(3, eps, R) == doctest::Approx(a * a).epsilon(1e-12));
    const auto V = bubble({3, eps, R, a}, bubble_grid({3, eps, R, a}, 1600));
    CHECK(std::abs(mass(V) - a * a) < 1e-8 * a * a);
  }

  // N=3: R ~ a^2 / eps.
  std::vector<double> e = eps_grid(0.2, 1.6, 6), R;
  for (double x : e) R.push_back(mass_radius(3, a, x));
  const auto f3 = rate_fit(e, R, -1.0);
  MESSAGE("N=3 slope " << f3.fit.slope);
  CHECK(f3.fit.slope == doctest::Approx(-1.0).epsilon(0.03));

  // N=4: log(R/eps) linear in eps^{-2}; slope a^2 / (16 pi^2) from W_1^2 ~ 8 s^{-4}.
  const double a4 = 1.0;
  std::vector<double> x, y;
  for (double eps : {0.06, 0.05, 0.045, 0.04, 0.035}) {
    x.push_back(1.0 / (eps * eps));
    y.push_back(std::log(mass_radius(4, a4, eps) / eps));
  }
  const auto lf = linear_fit(x, y, 0, x.size() - 1);
  MESSAGE("N=4 slope " << lf.slope << " r2 " << lf.r2);
  CHECK(lf.r2 > 0.9999);
  CHECK(lf.slope == doctest::Approx(a4 * a4 / (16.0 * M_PI * M_PI)).epsilon(0.02));

  CHECK(thrown_kind([] { mass_radius(3, 0.0, 0.1); }) == ErrorKind::InvalidParameter);
  CHECK(thrown_kind([] { mass_radius(5, 1.0, 0.1); }) == ErrorKind::InvalidParameter);
  CHECK(thrown_kind([] { mass_radius(3, 0.01, 0.1); }) == ErrorKind::NoRoot);
}

TEST_CASE("power and Riesz rates over an eps sweep") {
  const auto e = eps_grid(0.2, 1.6, 6);
  // Algebraic regime q in (3, 6): eps^{3 - q/2}.
  const auto s4 = bubble_sweep(3, 10.0, e, 4.0, 2.5, 1.0);
  CHECK(s4.expected_power.exponent == 1.0);
  CHECK(s4.power_fit.within(0.1));
  CHECK(s4.expected_riesz == doctest::Approx(1.5));
  CHECK(s4.riesz_fit.within(0.1));
  // Far-field regime q in (2, 3): eps^{3q/2 - 3}.
  const auto s25 = bubble_sweep(3, 10.0, e, 2.5, 2.5, 1.0);
  CHECK(s25.expected_power.regime == PowerRegime::FarField);
  CHECK(s25.power_fit.within(0.1));
  // q = 3: eps^{3/2} ln(1/eps).
  const auto s3 = bubble_sweep(3, 10.0, e, 3.0, 2.5, 1.0);
  CHECK(s3.expected_power.regime == PowerRegime::Logarithmic);
  CHECK(s3.power_fit.fit.slope < 0.0);
  CHECK(s3.power_fit.fit.r2 > 0.999);
  MESSAGE("slopes q=4 " << s4.power_fit.fit.slope << " q=2.5 " << s25.power_fit.fit.slope << " riesz "
                        << s4.riesz_fit.fit.slope);
  // Gradient and critical norms approach S^{N/2}.
  const auto& last = s4.rows.back();
  CHECK(std::abs(last.kinetic_dev) < 1e-3);
  CHECK(std::abs(last.critical_dev) < 1e-3);
  CHECK(std::abs(s4.rows.front().kinetic_dev) > std::abs(last.kinetic_dev));
  for (const auto& r : s4.rows) CHECK(std::abs(r.mass - 100.0) < 1e-8 * 100.0);
}

TEST_CASE("rate table") {
  CHECK(power_rate(3, 4.0).exponent == 1.0);
  CHECK(power_rate(3, 3.0).regime == PowerRegime::Logarithmic);
  CHECK(power_rate(3, 2.5).exponent == doctest::Approx(0.75));
  CHECK(power_rate(4, 3.0).exponent == doctest::Approx(1.0));
  CHECK(riesz_rate(3, 1.0, 2.5) == doctest::Approx(1.5));
  CHECK(thrown_kind([] { power_rate(3, 6.0); }) == ErrorKind::InvalidParameter);
  CHECK(thrown_kind([] { riesz_rate(3, 1.0, 2.0); }) == ErrorKind::InvalidParameter);
}
