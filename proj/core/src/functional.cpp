#include "choquard/functional.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/riesz.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

namespace choquard {

std::string to_string(Mode m) {
  switch (m) {
  case Mode::Lambda: return "lambda";
  case Mode::Mu: return "mu";
  case Mode::General: return "general";
  case Mode::Normalized: return "normalized";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "lambda") return Mode::Lambda;
  if (s == "mu") return Mode::Mu;
  if (s == "general") return Mode::General;
  if (s == "normalized") return Mode::Normalized;
  fail(ErrorKind::InvalidConfiguration, "unknown mode '" + s + "'");
}

ProblemParams ProblemParams::lambda_problem(int N, double alpha, double p, double q,
                                            double lambda) {
  ProblemParams r;
  r.N = N, r.alpha = alpha, r.p = p, r.q = q, r.mode = Mode::Lambda, r.lambda = lambda;
  r.mu = 1.0;
  r.validate();
  return r;
}

ProblemParams ProblemParams::mu_problem(int N, double alpha, double p, double q, double mu) {
  ProblemParams r;
  r.N = N, r.alpha = alpha, r.p = p, r.q = q, r.mode = Mode::Mu, r.mu = mu;
  r.lambda = 1.0;
  r.validate();
  return r;
}

ProblemParams ProblemParams::general(int N, double alpha, double p, double q, double mu,
                                     double lambda) {
  ProblemParams r;
  r.N = N, r.alpha = alpha, r.p = p, r.q = q, r.mode = Mode::General;
  r.mu = mu, r.lambda = lambda;
  r.validate();
  return r;
}

ProblemParams ProblemParams::normalized(int N, double alpha, double other, double nu, double a,
                                        CriticalTerm critical) {
  ProblemParams r;
  r.N = N, r.alpha = alpha, r.mode = Mode::Normalized, r.nu = nu, r.a = a;
  r.critical = critical;
  if (critical == CriticalTerm::Hls) {
    r.p = (N + alpha) / (N - 2.0);
    r.q = other;
  } else {
    r.q = 2.0 * N / (N - 2.0);
    r.p = other;
  }
  r.validate();
  return r;
}

void ProblemParams::validate() const {
  if (N < 3) fail(ErrorKind::InvalidParameter, "N must be >= 3");
  if (!(alpha > 0.0 && alpha < N)) fail(ErrorKind::InvalidParameter, "alpha must lie in (0, N)");
  const double plo = (N + alpha) / N, phi = (N + alpha) / (N - 2.0);
  const double eps = 1e-12;
  if (!(p > plo && p <= phi + eps))
    fail(ErrorKind::InvalidParameter, "p must lie in ((N+alpha)/N, (N+alpha)/(N-2)]");
  if (!(q > 2.0 && q <= two_star() + eps))
    fail(ErrorKind::InvalidParameter, "q must lie in (2, 2N/(N-2)]");
  if (mode == Mode::Normalized) {
    if (!(nu >= 0.0)) fail(ErrorKind::InvalidParameter, "nu must be nonnegative");
    if (!(a > 0.0)) fail(ErrorKind::InvalidParameter, "mass parameter a must be positive");
    if (critical == CriticalTerm::Hls && std::abs(p - phi) > eps)
      fail(ErrorKind::InvalidParameter, "HLS-critical normalized mode needs p = (N+alpha)/(N-2)");
    if (critical == CriticalTerm::Sobolev && std::abs(q - two_star()) > eps)
      fail(ErrorKind::InvalidParameter, "Sobolev-critical normalized mode needs q = 2N/(N-2)");
    return;
  }
  if (!(riesz_coeff() >= 0.0) || !(power_coeff() >= 0.0))
    fail(ErrorKind::InvalidParameter, "couplings must be nonnegative");
  if (riesz_coeff() == 0.0 && power_coeff() == 0.0)
    fail(ErrorKind::InvalidParameter, "at least one coupling must be positive");
}

double ProblemParams::two_star() const { return 2.0 * N / (N - 2.0); }
double ProblemParams::two_alpha_star() const { return (N + alpha) / (N - 2.0); }
double ProblemParams::gamma_q() const { return choquard::gamma_q(N, q); }
double ProblemParams::eta_p() const { return choquard::eta_p(N, alpha, p); }
double ProblemParams::gamma() const { return 2.0 * N - (N - 2.0) * q; }
double ProblemParams::eta() const { return N + alpha - p * (N - 2.0); }
double ProblemParams::sigma_lambda() const { return (two_star() - 2.0) / (q - 2.0); }
double ProblemParams::sigma_mu() const { return 2.0 / ((N - 2.0) * (p - 1.0) - alpha); }

double ProblemParams::riesz_coeff() const {
  switch (mode) {
  case Mode::Lambda: return 1.0;
  case Mode::Mu:
  case Mode::General: return mu;
  case Mode::Normalized: return critical == CriticalTerm::Hls ? 1.0 : nu;
  }
  return 0.0;
}

double ProblemParams::power_coeff() const {
  switch (mode) {
  case Mode::Lambda:
  case Mode::General: return lambda;
  case Mode::Mu: return 1.0;
  case Mode::Normalized: return critical == CriticalTerm::Hls ? nu : 1.0;
  }
  return 0.0;
}

double ProblemParams::mass_coeff() const { return mode == Mode::Normalized ? 0.0 : 1.0; }

// ---------------------------------------------------------------------------

Parts compute_parts(const ProblemParams& prm, const RadialField& u) {
  if (u.grid().dim() != prm.N)
    fail(ErrorKind::InvalidParameter, "field dimension does not match the problem");
  Parts out;
  out.K = gradient_seminorm(u);
  out.M = mass(u);
  out.R = prm.riesz_coeff() != 0.0 ? riesz::interaction_energy(u.grid(), u, prm.p, prm.alpha) : 0.0;
  out.P = lp_norm_pow(u, prm.q);
  return out;
}

double total_energy(const ProblemParams& prm, const Parts& s) {
  return 0.5 * s.K + 0.5 * prm.mass_coeff() * s.M - prm.riesz_coeff() * s.R / (2.0 * prm.p) -
         prm.power_coeff() * s.P / prm.q;
}

double normalized_pohozaev(const ProblemParams& prm, const Parts& s) {
  return s.K - prm.riesz_coeff() * prm.eta_p() * s.R - prm.power_coeff() * prm.gamma_q() * s.P;
}

double normalized_curvature(const ProblemParams& prm, const Parts& s) {
  const double e = prm.eta_p(), g = prm.gamma_q();
  return 2.0 * s.K - 2.0 * prm.p * e * e * prm.riesz_coeff() * s.R -
         prm.q * g * g * prm.power_coeff() * s.P;
}

Defects defects_from_parts(const ProblemParams& prm, const Parts& s) {
  Defects d;
  const double cR = prm.riesz_coeff(), cP = prm.power_coeff();
  const int N = prm.N;
  if (prm.mode == Mode::Normalized) {
    // Fiber stationarity and the multiplier consistency identity: the
    // multiplier read off the Nehari identity against the one implied by
    // combining it with the Pohozaev identity.
    d.nehari = normalized_pohozaev(prm, s);
    d.nehari_rel = d.nehari / std::max({s.K, cR * s.R, cP * s.P});
    const double lam_nehari = cR * s.R + cP * s.P - s.K;
    double lam_identity;
    if (prm.critical == CriticalTerm::Hls)
      lam_identity = 2.0 * (prm.two_star() - prm.q) / (prm.q * (prm.two_star() - 2.0)) * cP * s.P;
    else
      lam_identity = prm.eta() / (2.0 * prm.p) * cR * s.R;
    d.pohozaev = lam_nehari - lam_identity;
    d.pohozaev_rel = d.pohozaev / std::max({std::abs(lam_nehari), std::abs(lam_identity),
                                            std::numeric_limits<double>::min()});
    return d;
  }
  d.nehari = s.K + s.M - cR * s.R - cP * s.P;
  d.nehari_rel = d.nehari / (s.K + s.M);
  d.pohozaev = 0.5 * (N - 2.0) * s.K + 0.5 * N * s.M - (N + prm.alpha) / (2.0 * prm.p) * cR * s.R -
               N / prm.q * cP * s.P;
  d.pohozaev_rel = d.pohozaev / (0.5 * (N - 2.0) * s.K + 0.5 * N * s.M);
  return d;
}

EnergyBreakdown breakdown_from_parts(const ProblemParams& prm, const Parts& s) {
  EnergyBreakdown e;
  e.kinetic = s.K;
  e.mass = s.M;
  e.riesz = s.R;
  e.power = s.P;
  e.total = total_energy(prm, s);
  const auto d = defects_from_parts(prm, s);
  e.nehari_defect = d.nehari;
  e.pohozaev_defect = d.pohozaev;
  return e;
}

EnergyBreakdown energy_breakdown(const ProblemParams& prm, const RadialField& u) {
  return breakdown_from_parts(prm, compute_parts(prm, u));
}

Defects stationarity_defects(const ProblemParams& prm, const RadialField& u) {
  if (u.is_zero()) fail(ErrorKind::DegenerateField, "defects are undefined at the zero field");
  return defects_from_parts(prm, compute_parts(prm, u));
}

// ---------------------------------------------------------------------------

double nehari_root(double A, double B, double C, double p, double q) {
  if (!(A > 0.0)) fail(ErrorKind::DegenerateField, "nonpositive quadratic part");
  if (!(B > 0.0) && !(C > 0.0))
    fail(ErrorKind::NoProjection, "both nonlinear terms vanish; no Nehari projection");
  B = std::max(B, 0.0);
  C = std::max(C, 0.0);
  // g(s) = B e^{(2p-2)s} + C e^{(q-2)s} - A is increasing in s = log t.
  auto g = [&](double s) { return B * std::exp((2 * p - 2) * s) + C * std::exp((q - 2) * s) - A; };
  auto dg = [&](double s) {
    return (2 * p - 2) * B * std::exp((2 * p - 2) * s) + (q - 2) * C * std::exp((q - 2) * s);
  };
  double lo = -1.0, hi = 1.0;
  while (g(lo) > 0.0) lo *= 2.0;
  while (g(hi) < 0.0) hi *= 2.0;
  const double guess = std::clamp(0.0, lo, hi);
  std::uintmax_t it = 200;
  const double s = boost::math::tools::newton_raphson_iterate(
      [&](double x) { return std::make_pair(g(x), dg(x)); }, guess, lo, hi, 50, it);
  return std::exp(s);
}

double nehari_scale(const ProblemParams& prm, const Parts& s) {
  if (prm.mode == Mode::Normalized)
    fail(ErrorKind::InvalidParameter, "Nehari projection is not defined in normalized mode");
  return nehari_root(s.K + s.M, prm.riesz_coeff() * s.R, prm.power_coeff() * s.P, prm.p, prm.q);
}

Projection nehari_project(const ProblemParams& prm, const RadialField& u) {
  if (u.is_zero()) fail(ErrorKind::NoProjection, "cannot project the zero field");
  const double t = nehari_scale(prm, compute_parts(prm, u));
  return {t, u.scaled(t)};
}

// ---------------------------------------------------------------------------

std::string to_string(FiberKind k) {
  switch (k) {
  case FiberKind::Nehari: return "nehari";
  case FiberKind::Dilation: return "dilation";
  case FiberKind::MassPreserving: return "mass";
  }
  return "?";
}

FiberKind fiber_kind_from_string(const std::string& s) {
  if (s == "nehari" || s == "scaling") return FiberKind::Nehari;
  if (s == "dilation") return FiberKind::Dilation;
  if (s == "mass" || s == "mass-preserving") return FiberKind::MassPreserving;
  fail(ErrorKind::InvalidConfiguration, "unknown fiber kind '" + s + "'");
}

Parts scale_parts(const ProblemParams& prm, const Parts& b, FiberKind kind, double t) {
  const int N = prm.N;
  Parts s;
  switch (kind) {
  case FiberKind::Nehari:
    s.K = t * t * b.K;
    s.M = t * t * b.M;
    s.R = std::pow(t, 2.0 * prm.p) * b.R;
    s.P = std::pow(t, prm.q) * b.P;
    break;
  case FiberKind::Dilation:
    s.K = std::pow(t, N - 2.0) * b.K;
    s.M = std::pow(t, N) * b.M;
    s.R = std::pow(t, N + prm.alpha) * b.R;
    s.P = std::pow(t, N) * b.P;
    break;
  case FiberKind::MassPreserving:
    s.K = t * t * b.K;
    s.M = b.M;
    s.R = std::pow(t, 2.0 * prm.p * prm.eta_p()) * b.R;
    s.P = std::pow(t, prm.q * prm.gamma_q()) * b.P;
    break;
  }
  return s;
}

FiberProfile fiber_profile_from_parts(const ProblemParams& prm, const Parts& base, FiberKind kind,
                                      const std::vector<double>& t) {
  if (t.empty()) fail(ErrorKind::InvalidConfiguration, "empty t grid");
  for (double x : t)
    if (!(x > 0.0)) fail(ErrorKind::InvalidConfiguration, "fiber t values must be positive");
  FiberProfile f;
  f.kind = kind;
  f.t = t;
  for (double x : t) {
    f.parts.push_back(scale_parts(prm, base, kind, x));
    f.energy.push_back(total_energy(prm, f.parts.back()));
  }
  const std::size_t n = t.size();
  const double scale = std::max(1.0, *std::max_element(f.energy.begin(), f.energy.end(),
                                                       [](double a, double b) {
                                                         return std::abs(a) < std::abs(b);
                                                       }));
  const double flat = 1e-14 * std::abs(scale);
  bool plateau_seen = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double l = f.energy[i] - f.energy[i - 1], r = f.energy[i + 1] - f.energy[i];
    if (std::abs(l) <= flat && !plateau_seen) {
      // Leftmost plateau: record its width, report its left end once.
      std::size_t j = i;
      while (j + 1 < n && std::abs(f.energy[j + 1] - f.energy[j]) <= flat) ++j;
      f.plateau_width = t[j] - t[i - 1];
      plateau_seen = true;
      f.critical.push_back(i - 1);
      f.curvature.push_back(0);
      continue;
    }
    if ((l > 0 && r < 0) || (l < 0 && r > 0)) {
      f.critical.push_back(i);
      const double d2 = r - l;
      f.curvature.push_back(d2 > 0 ? 1 : (d2 < 0 ? -1 : 0));
    }
  }
  return f;
}

FiberProfile fiber_profile(const ProblemParams& prm, const RadialField& u, FiberKind kind,
                           const std::vector<double>& t) {
  return fiber_profile_from_parts(prm, compute_parts(prm, u), kind, t);
}

std::string to_string(Branch b) {
  switch (b) {
  case Branch::Plus: return "P+";
  case Branch::Zero: return "P0";
  case Branch::Minus: return "P-";
  }
  return "?";
}

MassFiberClass mass_fiber_classify_parts(const ProblemParams& prm, const Parts& b) {
  if (prm.mode != Mode::Normalized)
    fail(ErrorKind::InvalidParameter, "mass fiber classification needs normalized mode");
  // f(t) = t Psi'(t) = P_nu(u^t); its roots are the fiber's critical points.
  auto f = [&](double lt) {
    return normalized_pohozaev(prm, scale_parts(prm, b, FiberKind::MassPreserving, std::exp(lt)));
  };
  MassFiberClass out;
  const int samples = 4001;
  const double lo = -30.0, hi = 30.0;
  double prev_x = lo, prev = f(lo);
  for (int k = 1; k < samples; ++k) {
    const double x = lo + (hi - lo) * k / (samples - 1);
    const double v = f(x);
    if ((prev > 0 && v <= 0) || (prev < 0 && v >= 0)) {
      double root;
      if (v == 0.0) {
        root = x;
      } else {
        std::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(
            f, prev_x, x, prev, v, boost::math::tools::eps_tolerance<double>(50), it);
        root = 0.5 * (r.first + r.second);
      }
      FiberPoint pt;
      pt.t = std::exp(root);
      const Parts s = scale_parts(prm, b, FiberKind::MassPreserving, pt.t);
      pt.energy = total_energy(prm, s);
      pt.second = normalized_curvature(prm, s);
      const double ref = 1e-10 * std::max(1.0, 2.0 * s.K);
      pt.branch = pt.second > ref ? Branch::Plus : (pt.second < -ref ? Branch::Minus : Branch::Zero);
      out.points.push_back(pt);
      if (pt.branch == Branch::Plus && !out.plus) out.plus = pt;
      if (pt.branch == Branch::Minus && !out.minus) out.minus = pt;
    }
    prev_x = x;
    prev = v;
  }
  return out;
}

MassFiberClass mass_fiber_classify(const ProblemParams& prm, const RadialField& u) {
  const double m = mass(u), a2 = prm.a * prm.a;
  if (std::abs(m - a2) > 1e-8 * a2)
    fail(ErrorKind::ConstraintViolation, "field is off the mass sphere");
  return mass_fiber_classify_parts(prm, compute_parts(prm, u));
}

// ---------------------------------------------------------------------------

RadialField rescale_field(const RadialField& u, double amp, double s) {
  const auto& g = u.grid();
  auto grid = make_grid(g.dim(), g.r_max() * s, g.intervals(), g.grading());
  std::vector<double> v(u.values());
  for (double& x : v) x *= amp;
  return RadialField(grid, std::move(v));
}

RadialField mass_preserving_dilate(const RadialField& u, double t) {
  return rescale_field(u, std::pow(t, 0.5 * u.grid().dim()), 1.0 / t);
}

} // namespace choquard
