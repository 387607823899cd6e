#pragma once
#include "choquard/grid.hpp"

#include <optional>

namespace choquard {

double riesz_normalization(int N, double alpha);
double hls_constant(int N, double alpha);
double sobolev_constant_analytic(int N);

double two_star(int N);
double two_alpha_star(int N, double alpha);
// N(q-2)/(2q) and (Np-N-alpha)/(2p); no range checks.
double gamma_q(int N, double q);
double eta_p(int N, double alpha, double p);

// Talenti profile W_1(r) = [N(N-2)]^{(N-2)/4} (1+r^2)^{-(N-2)/2}.
double talenti_value(int N, double r);
// W_eps(r) = eps^{-(N-2)/2} W_1(r/eps).
RadialField talenti_field(const GridPtr& grid, double eps = 1.0);

// C_{Nq}^q from the L2 norm of the local ground state Q_q.
double gn_constant_pow(int N, double q, double Q_l2_norm);

struct RayleighConstants {
  double S = 0;
  double S_alpha = 0;
  std::optional<double> S_q;
  std::optional<double> S_p;
};

struct RayleighInputs {
  const RadialField* talenti = nullptr;     // W_1 on a large grid (or any dilate)
  const RadialField* local_ground = nullptr; // Q_q
  const RadialField* choquard_ground = nullptr;
  double alpha = 1.0;
  double p = 2.0;
  double q = 4.0;
};

// Quotients at the supplied fields. A missing Talenti field raises
// DependencyMissing; S_q / S_p are filled only when their fields are given.
RayleighConstants rayleigh_constants(const RayleighInputs& in);
double sobolev_quotient(const RadialField& w);
double hls_quotient(const RadialField& w, double alpha);
double local_quotient(const RadialField& u, double q);          // (K+M)/P^{2/q}
double choquard_quotient(const RadialField& u, double p, double alpha); // (K+M)/R^{1/p}

struct SharpInputs {
  double S = 0;
  double S_alpha = 0;
  std::optional<double> C_Nq_pow_q;  // C_{Nq}^q
  std::optional<double> C_Np_pow_2p; // C_{N,2Np/(N+alpha)}^{2p}
};

struct CoefficientTable {
  int N = 3;
  double alpha = 1, p = 2, q = 4;
  std::optional<double> gamma_q; // defined for q in (2, 2*)
  std::optional<double> eta_p;   // defined for p in ((N+alpha)/N, (N+alpha)/(N-2))
  std::optional<double> K_q;     // q in (2, 2+4/N)
  std::optional<double> K_p;     // p in ((N+alpha)/N, 1+(2+alpha)/N)
  double crit_level_hls = 0;
  double crit_level_sob = 0;
};

CoefficientTable coefficient_table(int N, double alpha, double p, double q, const SharpInputs& in);

// Smallness bounds for the mass-constrained problems; nullopt when the
// formula does not apply to the exponents.
std::optional<double> hls_smallness_bound(const CoefficientTable& t, const SharpInputs& in); // bound on nu a^{q(1-gamma_q)}
std::optional<double> sob_smallness_bound(const CoefficientTable& t, const SharpInputs& in); // bound on nu a^{2p(1-eta_p)}

double crit_level_hls(int N, double alpha, double S_alpha);
double crit_level_sob(int N, double S);

} // namespace choquard
