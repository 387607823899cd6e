#pragma once
#include "choquard/functional.hpp"
#include "choquard/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choquard {

struct InitSpec {
  enum class Kind { Gaussian, Bubble, Supplied };
  Kind kind = Kind::Gaussian;
  double scale = 1.0; // Gaussian width or bubble epsilon
  RadialField field;  // Supplied

  static InitSpec gaussian(double width = 1.0);
  static InitSpec bubble(double eps);
  static InitSpec supplied(RadialField f);
  std::string tag() const;
  RadialField build(const GridPtr& grid) const;
};

std::vector<InitSpec> default_schedule();

struct SolverOptions {
  int max_descent = 3000;
  int max_newton = 40;
  double residual_tol = 1e-6;    // pde residual relative to max |u|
  double defect_tol = 1e-4;      // relative Nehari / Pohozaev defects
  double newton_switch = 1e-3;   // descent residual (relative to max |-Lu + u|) at which Newton takes over
  double level_tol = 1e-10;      // stagnation test for the descent
  bool newton = true;
};

struct GroundStateResult {
  ProblemParams params;
  RadialField u;
  double level = 0;
  Defects defects;
  double pde_residual = 0;
  int iterations = 0;
  bool converged = false;
  std::string init;
  std::string note;
  bool positive = false;
  bool monotone = false;
};

// Frequency-one residual -Lu + u - RHS on the grid, max norm over r <= 0.95 r_max,
// relative to max |u|.
double pde_residual(const ProblemParams& prm, const RadialField& u);

// Nehari-constrained descent (preconditioned gradient with Barzilai-Borwein
// steps and Nehari reprojection), polished by Newton. Returns the lowest
// level over the schedule, preferring converged runs.
GroundStateResult ground_state(const ProblemParams& prm, const GridPtr& grid,
                               const std::vector<InitSpec>& schedule = default_schedule(),
                               const SolverOptions& opt = {});
// One initialization only.
GroundStateResult ground_state_single(const ProblemParams& prm, const GridPtr& grid,
                                      const InitSpec& init, const SolverOptions& opt = {});

struct NormalizedBranchResult {
  ProblemParams params;
  RadialField u;
  Branch branch = Branch::Minus;
  double level = 0;
  double lambda_nu = 0;
  double multiplier_identity_defect = 0;
  double pde_residual = 0;
  double fiber_second = 0; // classification value at the returned field
  int iterations = 0;
  bool converged = false;
  std::string note;
};

struct NormalizedOptions {
  int max_flow = 4000;
  int max_newton = 40;
  double flow_switch = 1e-4;
  double residual_tol = 1e-6;
  bool newton = true;
  // Upper bound on nu a^{q(1-gamma_q)} (HLS-critical) or nu a^{2p(1-eta_p)}
  // (Sobolev-critical) for the local-minimum branch; unchecked when absent.
  std::optional<double> smallness_bound;
  // Re-centre the flow iterate on its fiber point when t* leaves [1/r, r].
  double recenter_ratio = 1.5;
};

struct NormalizedBranches {
  std::optional<NormalizedBranchResult> plus;
  std::optional<NormalizedBranchResult> minus;
  std::string plus_reason; // why P+ is absent, when it is
};

NormalizedBranchResult normalized_branch(const ProblemParams& prm, const GridPtr& grid, Branch branch,
                                         const InitSpec& init, const NormalizedOptions& opt = {});
NormalizedBranches normalized_branches(const ProblemParams& prm, const GridPtr& grid,
                                       const std::vector<InitSpec>& schedule = {},
                                       const NormalizedOptions& opt = {});
// Separate grids: the local-minimum branch is typically wide, the
// mountain-pass branch concentrated.
NormalizedBranches normalized_branches(const ProblemParams& prm, const GridPtr& grid_plus, const GridPtr& grid_minus,
                                       const std::vector<InitSpec>& schedule = {},
                                       const NormalizedOptions& opt = {});

// lambda_nu a^2 = 2(2*-q)/(q(2*-2)) nu |u|_q^q (HLS-critical) or
// lambda_nu a^2 = (N+alpha-p(N-2))/(2p) nu R (Sobolev-critical). Coefficient only.
double multiplier_coefficient(const ProblemParams& prm);
// Multiplier predicted by the identity for a field with the given parts.
double multiplier_from_identity(const ProblemParams& prm, const Parts& parts);
// |lambda_nu - identity| / lambda_nu.
double multiplier_check(const NormalizedBranchResult& r);

struct SecondSolution {
  RadialField field;
  ProblemParams params; // frequency-one problem at the effective coupling
  double coupling = 0;
  double coupling_exponent = 0;
  double energy = 0;     // E = I - M/2 of the candidate
  double action = 0;     // I of the candidate
  double pde_residual = 0;
};

// Exponent e with effective coupling = nu * lambda_nu^e.
double rescale_coupling_exponent(const ProblemParams& prm);
SecondSolution second_solution_via_rescale(const NormalizedBranchResult& branch, double residual_tol = 1e-4);

} // namespace choquard
