#include "choquard/constants.hpp"

#include "choquard/error.hpp"
#include "choquard/riesz.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace choquard {
namespace {
constexpr double pi = std::numbers::pi;

void check_alpha(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < N))
    fail(ErrorKind::InvalidParameter, "alpha must lie in (0, N)");
}
} // namespace

double riesz_normalization(int N, double alpha) {
  check_alpha(N, alpha);
  return std::tgamma(0.5 * (N - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(pi, 0.5 * N) * std::pow(2.0, alpha));
}

double hls_constant(int N, double alpha) {
  check_alpha(N, alpha);
  return std::pow(pi, 0.5 * (N - alpha)) * std::tgamma(0.5 * alpha) /
         std::tgamma(0.5 * (N + alpha)) *
         std::pow(std::tgamma(0.5 * N) / std::tgamma(static_cast<double>(N)), -alpha / N);
}

double sobolev_constant_analytic(int N) {
  return N * (N - 2) * pi *
         std::pow(std::tgamma(0.5 * N) / std::tgamma(static_cast<double>(N)), 2.0 / N);
}

double two_star(int N) { return 2.0 * N / (N - 2.0); }
double two_alpha_star(int N, double alpha) { return (N + alpha) / (N - 2.0); }
double gamma_q(int N, double q) { return N * (q - 2.0) / (2.0 * q); }
double eta_p(int N, double alpha, double p) { return (N * p - N - alpha) / (2.0 * p); }

double talenti_value(int N, double r) {
  return std::pow(N * (N - 2.0), 0.25 * (N - 2)) * std::pow(1.0 + r * r, -0.5 * (N - 2));
}

RadialField talenti_field(const GridPtr& grid, double eps) {
  const int N = grid->dim();
  const double amp = std::pow(eps, -0.5 * (N - 2));
  return RadialField::from_function(grid,
                                    [&](double r) { return amp * talenti_value(N, r / eps); });
}

double gn_constant_pow(int N, double q, double Q_l2_norm) {
  const double g = 2.0 * N - q * (N - 2.0);
  return 2.0 * q / g * std::pow(g / (N * (q - 2.0)), N * (q - 2.0) / 4.0) /
         std::pow(Q_l2_norm, q - 2.0);
}

// ---------------------------------------------------------------------------

namespace {
double guarded(double num, double den, const char* what) {
  if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
    fail(ErrorKind::DegenerateField, std::string("degenerate quotient: ") + what);
  return num / den;
}
} // namespace

double sobolev_quotient(const RadialField& w) {
  const int N = w.grid().dim();
  const double ts = two_star(N);
  return guarded(gradient_seminorm(w), std::pow(lp_norm_pow(w, ts), 2.0 / ts), "S");
}

double hls_quotient(const RadialField& w, double alpha) {
  const int N = w.grid().dim();
  const double p = two_alpha_star(N, alpha);
  const double R = riesz::interaction_energy(w.grid(), w, p, alpha);
  return guarded(gradient_seminorm(w), std::pow(R, (N - 2.0) / (N + alpha)), "S_alpha");
}

double local_quotient(const RadialField& u, double q) {
  return guarded(gradient_seminorm(u) + mass(u), std::pow(lp_norm_pow(u, q), 2.0 / q), "S_q");
}

double choquard_quotient(const RadialField& u, double p, double alpha) {
  const double R = riesz::interaction_energy(u.grid(), u, p, alpha);
  return guarded(gradient_seminorm(u) + mass(u), std::pow(R, 1.0 / p), "S_p");
}

RayleighConstants rayleigh_constants(const RayleighInputs& in) {
  if (!in.talenti || in.talenti->empty())
    fail(ErrorKind::DependencyMissing, "Talenti extremal field not supplied");
  RayleighConstants out;
  out.S = sobolev_quotient(*in.talenti);
  out.S_alpha = hls_quotient(*in.talenti, in.alpha);
  if (in.local_ground && !in.local_ground->empty())
    out.S_q = local_quotient(*in.local_ground, in.q);
  if (in.choquard_ground && !in.choquard_ground->empty())
    out.S_p = choquard_quotient(*in.choquard_ground, in.p, in.alpha);
  return out;
}

// ---------------------------------------------------------------------------

double crit_level_hls(int N, double alpha, double S_alpha) {
  return (2.0 + alpha) / (2.0 * (N + alpha)) * std::pow(S_alpha, (N + alpha) / (2.0 + alpha));
}

double crit_level_sob(int N, double S) { return std::pow(S, 0.5 * N) / N; }

CoefficientTable coefficient_table(int N, double alpha, double p, double q, const SharpInputs& in) {
  check_alpha(N, alpha);
  const double ts = two_star(N);
  const double plo = (N + alpha) / N, phi = (N + alpha) / (N - 2.0);
  if (!(q > 2.0 && q <= ts))
    fail(ErrorKind::InvalidParameter, "q must lie in (2, 2*]");
  if (!(p > plo && p <= phi))
    fail(ErrorKind::InvalidParameter, "p must lie in ((N+alpha)/N, (N+alpha)/(N-2)]");
  CoefficientTable t;
  t.N = N;
  t.alpha = alpha;
  t.p = p;
  t.q = q;
  if (q < ts) t.gamma_q = gamma_q(N, q);
  if (p < phi) t.eta_p = eta_p(N, alpha, p);

  // K_q: maximum of the HLS-critical lower-bound profile, q < 2 + 4/N.
  if (t.gamma_q && q < 2.0 + 4.0 / N && in.C_Nq_pow_q && in.S_alpha > 0) {
    const double as = two_alpha_star(N, alpha), g = *t.gamma_q;
    const double lead = (2.0 * as - q * g) / (2.0 * as * (2.0 - q * g) * std::pow(in.S_alpha, as));
    const double inner =
        as * (2.0 - q * g) * *in.C_Nq_pow_q * std::pow(in.S_alpha, as) / (q * (as - 1.0));
    t.K_q = lead * std::pow(inner, 2.0 * (as - 1.0) / (2.0 * as - q * g));
  }
  // K_p: maximum of the Sobolev-critical lower-bound profile, p < 1 + (2+alpha)/N.
  if (t.eta_p && p < 1.0 + (2.0 + alpha) / N && in.C_Np_pow_2p && in.S > 0) {
    const double e = *t.eta_p, pe = p * e;
    const double Ca = hls_constant(N, alpha);
    const double lead = (N * (alpha - (p - 1.0) * (N - 2.0)) + 2.0 * (N - alpha)) /
                        (2.0 * N * (2.0 + alpha - N * (p - 1.0))) * std::pow(in.S, -N / (N - 2.0));
    const double inner = N * (1.0 - pe) * Ca * *in.C_Np_pow_2p / (2.0 * p) *
                         std::pow(in.S, N / (N - 2.0));
    t.K_p = lead * std::pow(inner, 2.0 / (N - pe * (N - 2.0)));
  }
  t.crit_level_hls = in.S_alpha > 0 ? crit_level_hls(N, alpha, in.S_alpha) : 0.0;
  t.crit_level_sob = in.S > 0 ? crit_level_sob(N, in.S) : 0.0;
  return t;
}

std::optional<double> hls_smallness_bound(const CoefficientTable& t, const SharpInputs& in) {
  const int N = t.N;
  const double q = t.q;
  if (!t.gamma_q) return std::nullopt;
  const double crit = 2.0 + 4.0 / N;
  if (q < crit) {
    if (!t.K_q) return std::nullopt;
    const double g = *t.gamma_q;
    return std::pow(2.0 * *t.K_q,
                    -(2.0 * (N + t.alpha) - q * g * (N - 2.0)) / (2.0 * (2.0 + t.alpha)));
  }
  if (q == crit) {
    if (!in.C_Nq_pow_q) return std::nullopt;
    return q / (2.0 * *in.C_Nq_pow_q);
  }
  return std::numeric_limits<double>::infinity();
}

std::optional<double> sob_smallness_bound(const CoefficientTable& t, const SharpInputs& in) {
  const int N = t.N;
  const double p = t.p;
  if (!t.eta_p) return std::nullopt;
  const double crit = 1.0 + (2.0 + t.alpha) / N;
  if (p < crit) {
    if (!t.K_p) return std::nullopt;
    return std::pow(2.0 * *t.K_p, -(N - p * *t.eta_p * (N - 2.0)) / 2.0);
  }
  if (p == crit) {
    if (!in.C_Np_pow_2p) return std::nullopt;
    return p / (hls_constant(N, t.alpha) * *in.C_Np_pow_2p);
  }
  return std::numeric_limits<double>::infinity();
}

} // namespace choquard
