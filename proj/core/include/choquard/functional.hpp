#pragma once

#include "choquard/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choquard {

enum class Mode { Lambda, Mu, General, Normalized };
// Which term carries the critical exponent in normalized mode.
enum class CriticalTerm { Hls, Sobolev };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Exponents, couplings and derived quantities.
//   Lambda:     -Lu + u = (I*u^p)u^{p-1} + lambda u^{q-1}
//   Mu:         -Lu + u = mu (I*u^p)u^{p-1} + u^{q-1}
//   General:    -Lu + u = mu (I*u^p)u^{p-1} + lambda u^{q-1}
//   Normalized: -Lu + l u = c_R (I*u^p)u^{p-1} + c_P u^{q-1}, |u|_2^2 = a^2,
//               with (c_R, c_P) = (1, nu) when the Choquard term is HLS-critical
//               and (nu, 1) when the local term is Sobolev-critical.
struct ProblemParams {
  int N = 3;
  double alpha = 1.0;
  double p = 2.0;
  double q = 4.0;
  Mode mode = Mode::Lambda;
  double lambda = 1.0;
  double mu = 1.0;
  double nu = 1.0;
  double a = 1.0;
  CriticalTerm critical = CriticalTerm::Hls;

  static ProblemParams lambda_problem(int N, double alpha, double p, double q, double lambda);
  static ProblemParams mu_problem(int N, double alpha, double p, double q, double mu);
  static ProblemParams general(int N, double alpha, double p, double q, double mu, double lambda);
  // p (HLS) or q (Sobolev) is set to its critical value.
  static ProblemParams normalized(int N, double alpha, double other_exponent, double nu, double a,
                                  CriticalTerm critical);

  void validate() const;

  double two_star() const;
  double two_alpha_star() const;
  double gamma_q() const; // N(q-2)/(2q)
  double eta_p() const;   // (Np-N-alpha)/(2p)
  double gamma() const;   // 2N-(N-2)q
  double eta() const;     // N+alpha-p(N-2)
  // sigma of the lambda -> 0 rescaling (HLS-critical p) and of the mu -> 0
  // rescaling (Sobolev-critical q).
  double sigma_lambda() const;
  double sigma_mu() const;

  // Coefficients multiplying R = int (I*u^p)u^p and P = int u^q.
  double riesz_coeff() const;
  double power_coeff() const;
  // Coefficient of the mass term in the energy (1 for frequency-one modes,
  // 0 in normalized mode where the mass is a constraint).
  double mass_coeff() const;
};

struct EnergyBreakdown {
  double kinetic = 0; // int |grad u|^2
  double mass = 0;    // int u^2
  double riesz = 0;   // int (I*u^p)u^p
  double power = 0;   // int u^q
  double total = 0;
  double nehari_defect = 0;
  double pohozaev_defect = 0;
};

struct Parts {
  double K = 0, M = 0, R = 0, P = 0;
};

Parts compute_parts(const ProblemParams& prm, const RadialField& u);
double total_energy(const ProblemParams& prm, const Parts& parts);
EnergyBreakdown breakdown_from_parts(const ProblemParams& prm, const Parts& parts);
EnergyBreakdown energy_breakdown(const ProblemParams& prm, const RadialField& u);

struct Defects {
  double nehari = 0;
  double pohozaev = 0;
  // Divided by the largest term entering each identity.
  double nehari_rel = 0;
  double pohozaev_rel = 0;
};

Defects defects_from_parts(const ProblemParams& prm, const Parts& parts);
Defects stationarity_defects(const ProblemParams& prm, const RadialField& u);

// Unique t > 0 with t^2 A = t^{2p} B + t^q C (B, C >= 0, not both zero).
double nehari_root(double A, double B, double C, double p, double q);

struct Projection {
  double t_star = 1.0;
  RadialField field;
};
Projection nehari_project(const ProblemParams& prm, const RadialField& u);
double nehari_scale(const ProblemParams& prm, const Parts& parts);

enum class FiberKind { Nehari, Dilation, MassPreserving };
std::string to_string(FiberKind k);
FiberKind fiber_kind_from_string(const std::string& s);

struct FiberProfile {
  FiberKind kind = FiberKind::Nehari;
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<Parts> parts;           // scaled parts at each t
  std::vector<std::size_t> critical;  // indices of discrete local extrema
  std::vector<int> curvature;         // sign of the second difference at each critical index
  double plateau_width = 0;           // width of the leftmost flat run, if any
};

Parts scale_parts(const ProblemParams& prm, const Parts& base, FiberKind kind, double t);
FiberProfile fiber_profile(const ProblemParams& prm, const RadialField& u, FiberKind kind,
                           const std::vector<double>& t);
FiberProfile fiber_profile_from_parts(const ProblemParams& prm, const Parts& base, FiberKind kind,
                                      const std::vector<double>& t);

enum class Branch { Plus, Zero, Minus };
std::string to_string(Branch b);

struct FiberPoint {
  double t = 0;
  double energy = 0;
  double second = 0; // t * d/dt of the Pohozaev-type functional at u^t
  Branch branch = Branch::Zero;
};

struct MassFiberClass {
  std::vector<FiberPoint> points; // ordered by t
  std::optional<FiberPoint> plus;
  std::optional<FiberPoint> minus;
};

// Pohozaev-type constraint functional of the mass-constrained problem.
double normalized_pohozaev(const ProblemParams& prm, const Parts& parts);
// 2K - 2p eta_p^2 c_R R - q gamma_q^2 c_P P (positive on P+, negative on P-).
double normalized_curvature(const ProblemParams& prm, const Parts& parts);

MassFiberClass mass_fiber_classify_parts(const ProblemParams& prm, const Parts& parts);
MassFiberClass mass_fiber_classify(const ProblemParams& prm, const RadialField& u);

// Mass-preserving dilation t^{N/2} u(t x) realised exactly on a rescaled grid.
RadialField mass_preserving_dilate(const RadialField& u, double t);
// Generic exact rescale: amp * u(x / s) on a grid with r_max scaled by s.
RadialField rescale_field(const RadialField& u, double amp, double s);

} // namespace choquard
