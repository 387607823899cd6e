#include "choquard/testfn.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/riesz.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>

namespace choquard {

double cutoff_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

void validate(const BubbleSpec& spec) {
  if (spec.N < 3) fail(ErrorKind::InvalidParameter, "bubble needs N >= 3");
  if (!(spec.eps > 0.0)) fail(ErrorKind::InvalidParameter, "bubble needs eps > 0");
  if (!(spec.R >= 4.0 * spec.eps)) fail(ErrorKind::InvalidParameter, "bubble needs R >= 4 eps");
}

RadialField bubble(const BubbleSpec& spec, const GridPtr& grid) {
  validate(spec);
  if (grid->dim() != spec.N) fail(ErrorKind::IncompatibleGrid, "grid dimension differs from the bubble");
  if (grid->size() < 2 || grid->node(1) > 0.25 * spec.eps)
    fail(ErrorKind::Resolution, "grid does not resolve the concentration scale (first node above eps/4)");
  if (grid->r_max() < 2.0 * spec.R) fail(ErrorKind::Resolution, "grid does not cover the cut-off support [0, 2R]");
  const double amp = std::pow(spec.eps, -0.5 * (spec.N - 2));
  return RadialField::from_function(grid, [&](double r) {
    return amp * talenti_value(spec.N, r / spec.eps) * cutoff_profile(r / spec.R);
  });
}

GridPtr bubble_grid(const BubbleSpec& spec, int n) {
  validate(spec);
  const double r_max = 2.2 * spec.R;
  // Grading >= 2 that puts about 24 nodes inside [0, eps].
  const double g = std::max(2.0, std::log(r_max / spec.eps) / std::log(n / 24.0));
  return make_grid(spec.N, r_max, n, g);
}

double bubble_mass(int N, double eps, double R) {
  using boost::math::quadrature::gauss_kronrod;
  const double area = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
  // r = eps e^x; integrand W_1(s)^2 phi^2 s^N dx.
  auto f = [&](double x) {
    const double s = std::exp(x);
    const double w = talenti_value(N, s) * cutoff_profile(eps * s / R);
    return w * w * std::pow(s, N);
  };
  const double x1 = std::log(R / eps), x2 = std::log(2.0 * R / eps);
  double total = 0.0;
  const double lo = -40.0;
  // Piecewise to keep the kink at s = R/eps on a panel boundary.
  std::vector<double> cuts{lo};
  for (double x = -4.0; x < x1; x += 4.0) cuts.push_back(x);
  cuts.push_back(x1);
  cuts.push_back(x2);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    total += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 15, 1e-14);
  }
  return area * eps * eps * total;
}

double mass_radius(int N, double a, double eps) {
  if (N != 3 && N != 4) fail(ErrorKind::InvalidParameter, "mass calibration implemented for N = 3, 4");
  if (!(a > 0.0) || !(eps > 0.0)) fail(ErrorKind::InvalidParameter, "mass calibration needs a > 0 and eps > 0");
  const double a2 = a * a;
  auto f = [&](double logR) { return bubble_mass(N, eps, std::exp(logR)) - a2; };
  const double lo = std::log(4.0 * eps);
  if (f(lo) >= 0.0) fail(ErrorKind::NoRoot, "mass already exceeds a^2 at R = 4 eps");
  double hi = lo + 1.0;
  while (f(hi) < 0.0) {
    hi = lo + 2.0 * (hi - lo);
    if (hi > 600.0) fail(ErrorKind::NoRoot, "no cut-off radius reaches the target mass");
  }
  std::uintmax_t it = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
  return std::exp(0.5 * (x0 + x1));
}

double grid_mass_radius(const BubbleSpec& spec, const GridPtr& grid, double a) {
  validate(spec);
  const double a2 = a * a;
  auto f = [&](double R) {
    BubbleSpec s = spec;
    s.R = R;
    return mass(bubble(s, grid)) - a2;
  };
  // Quadrature error of the grid is tiny, so a narrow bracket suffices.
  double lo = spec.R * 0.99, hi = std::min(spec.R * 1.01, 0.5 * grid->r_max());
  if (lo < 4.0 * spec.eps || f(lo) > 0.0 || f(hi) < 0.0)
    fail(ErrorKind::NoRoot, "grid mass calibration bracket failed");
  std::uintmax_t it = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [r0, r1] = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
  return 0.5 * (r0 + r1);
}

BubbleReport bubble_report(const RadialField& V, double eps, double R, double q, double p, double alpha) {
  const int N = V.grid().dim();
  BubbleReport b;
  b.N = N;
  b.eps = eps;
  b.R = R;
  b.q = q;
  b.p = p;
  b.alpha = alpha;
  b.kinetic = gradient_seminorm(V);
  b.mass = mass(V);
  b.power = lp_norm_pow(V, q);
  b.riesz = riesz::interaction_energy(V.grid(), V, p, alpha);
  b.critical_power = lp_norm_pow(V, two_star(N));
  const double SN = std::pow(sobolev_constant_analytic(N), 0.5 * N);
  b.kinetic_dev = b.kinetic / SN - 1.0;
  b.critical_dev = b.critical_power / SN - 1.0;
  return b;
}

std::string to_string(PowerRegime r) {
  switch (r) {
  case PowerRegime::Algebraic: return "algebraic";
  case PowerRegime::Logarithmic: return "logarithmic";
  case PowerRegime::FarField: return "far-field";
  }
  return "?";
}

PowerRate power_rate(int N, double q) {
  const double ts = two_star(N);
  if (!(q > 2.0 && q < ts)) fail(ErrorKind::InvalidParameter, "power rate needs 2 < q < 2*");
  const double qc = static_cast<double>(N) / (N - 2);
  if (q > qc) return {PowerRegime::Algebraic, N - 0.5 * (N - 2) * q};
  if (N != 3) fail(ErrorKind::InvalidParameter, "q <= N/(N-2) rates are tabulated for N = 3 only");
  if (q == qc) return {PowerRegime::Logarithmic, 1.5};
  return {PowerRegime::FarField, 1.5 * q - 3.0};
}

double riesz_rate(int N, double alpha, double p) {
  const double lo = (N + alpha) / (2.0 * (N - 2)), hi = (N + alpha) / (N - 2);
  if (!(p > lo && p < hi)) fail(ErrorKind::InvalidParameter, "Riesz rate needs (N+alpha)/(2(N-2)) < p < (N+alpha)/(N-2)");
  return N + alpha - p * (N - 2);
}

BubbleSweep bubble_sweep(int N, double a, const std::vector<double>& eps, double q, double p, double alpha, int n) {
  BubbleSweep sw;
  sw.expected_power = power_rate(N, q);
  const bool riesz_ok = p > (N + alpha) / (2.0 * (N - 2)) && p < (N + alpha) / (N - 2);
  if (riesz_ok) sw.expected_riesz = riesz_rate(N, alpha, p);
  std::vector<double> xs, pw, rz;
  for (double e : eps) {
    BubbleSpec spec{N, e, mass_radius(N, a, e), a};
    const auto g = bubble_grid(spec, n);
    spec.R = grid_mass_radius(spec, g, a);
    const auto V = bubble(spec, g);
    sw.rows.push_back(bubble_report(V, e, spec.R, q, p, alpha));
    xs.push_back(e);
    pw.push_back(sw.rows.back().power);
    rz.push_back(sw.rows.back().riesz);
  }
  if (sw.expected_power.regime == PowerRegime::Logarithmic) {
    // |V|_q^q / eps^{3/2} is linear in ln eps with a negative slope.
    std::vector<double> ratio;
    for (std::size_t i = 0; i < xs.size(); ++i) ratio.push_back(pw[i] / std::pow(xs[i], sw.expected_power.exponent));
    sw.power_fit = rate_fit(xs, ratio, std::nullopt, FitScale::LinLog);
  } else {
    sw.power_fit = rate_fit(xs, pw, sw.expected_power.exponent);
  }
  sw.riesz_fit = rate_fit(xs, rz, riesz_ok ? std::optional<double>(sw.expected_riesz) : std::nullopt);
  return sw;
}

} // namespace choquard
