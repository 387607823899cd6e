#pragma once
#include "choquard/asymptotics.hpp"
#include "choquard/functional.hpp"
#include "choquard/grid.hpp"
#include "choquard/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace choquard {

// Family member at coupling c: lambda for Mode::Lambda, mu for Mode::Mu.
ProblemParams with_coupling(const ProblemParams& family, double c);
double coupling_of(const ProblemParams& prm);

// Level the family pins at below its threshold: the HLS level when p is
// upper-critical (lambda family), the Sobolev level when q = 2* (mu family).
double threshold_level(const ProblemParams& family);

// ---------------------------------------------------------------- threshold

struct ThresholdOptions {
  double delta_rel = 0.005;   // predicate margin as a fraction of the critical level
  double tol_rel = 0.02;      // stop when c_hi - c_lo < tol_rel * c_hi
  int max_bisect = 30;
  SolverOptions solver;
  // Pinning diagnostic below the bracket: same n, stronger grading (finer core).
  bool diagnose = true;
  double diagnostic_grading = 3.0;
  int diagnostic_descent = 3000;
};

struct ScanPoint {
  double coupling = 0;
  double level = 0;
  double pde_residual = 0;
  double xi = 0;
  bool converged = false;
  bool attained = false; // converged and level < crit - delta
  std::string init;
};

// Evidence for one evaluated coupling at or below the bracket.
struct PinDiagnostic {
  double coupling = 0;
  bool converged_base = false;
  double level_base = 0;
  double level_refined = 0;   // equals level_base when the base run converged
  double xi_base = 0;
  double xi_refined = 0;
  bool pinned = false;        // level within delta of the critical level
  bool concentrating = false; // unconverged run whose xi shrinks under core refinement
};

struct ThresholdResult {
  Mode mode = Mode::Lambda;
  double c_lo = 0;
  double c_hi = 0;
  bool degenerate = false; // predicate already true at the lower end of the range
  double crit_level = 0;
  double delta = 0;        // absolute margin
  std::vector<ScanPoint> points;                       // evaluation order
  std::vector<std::pair<double, double>> history;      // bracket after each step
  std::vector<PinDiagnostic> below;                    // ascending coupling
  std::string refined_grid;
  std::string grid;
  std::string solver;

  const ScanPoint* at(double c) const;
  // Every point below the bracket pins, and at least one concentrates.
  bool pinned_below() const;
};

// Bisection on "converged ground state with level < crit - delta". The range
// is scanned from the top so warm starts follow the attained branch.
ThresholdResult scan_threshold(const ProblemParams& family, const GridPtr& grid, double c_lo, double c_hi,
                               double crit_level, const ThresholdOptions& opt = {});

// Evaluates the predicate of `r` at its endpoints on another grid; true when
// the new threshold lies inside [c_lo, c_hi] (brackets overlap).
struct BracketCheck {
  ScanPoint lo;
  ScanPoint hi;
  bool overlaps = false;
};
BracketCheck check_bracket(const ProblemParams& family, const GridPtr& grid, const ThresholdResult& r,
                           const ThresholdOptions& opt = {});

// ------------------------------------------------------------- monotonicity

struct MonotonicityReport {
  std::vector<double> coupling; // ascending
  std::vector<double> level;
  std::vector<bool> converged;
  double tol = 0;                       // absolute
  std::vector<std::size_t> violations;  // i with level[i+1] > level[i] + tol
  bool ok() const { return violations.empty(); }
};

// Ascending continuation: each point is warm-started from the previous
// minimizer, then the default schedule. Needs at least 8 couplings.
MonotonicityReport monotonicity_scan(const ProblemParams& family, const GridPtr& grid,
                                     std::vector<double> couplings, double tol_rel = 1e-6,
                                     const SolverOptions& opt = {});

// --------------------------------------------------------------- gap rates

struct GapRow {
  double coupling = 0;
  double level = 0;
  double scaled_level = 0; // c^{2/(q-2)} m (lambda) or c^{1/(p-1)} m (mu)
  double gap = 0;          // reference - scaled_level
  double pde_residual = 0;
  bool converged = false;
};

struct GapSeries {
  Mode mode = Mode::Lambda;
  double reference = 0;
  double expected = 0;
  std::vector<GapRow> rows;
  RateFit fit;
};

// Large-coupling limit level: local ground state (lambda family, by shooting)
// or the Choquard-only ground state on `grid` (mu family).
double gap_reference(const ProblemParams& family, const GridPtr& grid);
double gap_exponent(const ProblemParams& family);
GapSeries gap_series(const ProblemParams& family, const GridPtr& grid, const std::vector<double>& couplings,
                     double reference, const SolverOptions& opt = {});

// ------------------------------------------------------------ multiplicity

struct MultiplicityOptions {
  GridPtr grid_plus;  // defaults to the main grid
  GridPtr grid_minus;
  NormalizedOptions normalized;
  SolverOptions solver;
  double residual_tol = 1e-4;  // both solutions must beat this
  double level_tol = 1e-6;     // relative; energies must differ by > 3x
  double sup_rel = 1e-2;
};

struct MultiplicityRow {
  double nu = 0;
  Branch branch = Branch::Minus;
  bool gated = false;
  bool complete = false;
  std::string reason;
  double lambda_nu = 0;
  double multiplier_defect = 0;
  double coupling = 0;
  double energy_branch = 0;
  double energy_ground = 0;
  double residual_branch = 0;
  double residual_ground = 0;
  double sup_diff_rel = 0;
  bool two_solutions = false;
};

struct MultiplicityTable {
  ProblemParams params;
  std::vector<MultiplicityRow> rows;
  std::optional<double> expected_exponent;
  std::optional<RateFit> coupling_fit; // effective coupling vs nu, minus branch
};

// Exponent of the effective coupling as nu -> 0 (nullopt outside the tabulated regimes).
std::optional<double> effective_coupling_exponent(const ProblemParams& prm);

MultiplicityTable multiplicity_experiment(const ProblemParams& prm, const GridPtr& grid,
                                          const std::vector<double>& nu, const MultiplicityOptions& opt = {});

// ------------------------------------------------------------- persistence

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string code_version;
  std::vector<std::uint64_t> seeds;
  double wall_clock_s = 0;
  std::vector<std::string> artifacts; // relative to the run directory
  std::string run_id;                 // derived from command, config and seeds

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

enum class ArtifactKind { Solve, Fit, Table };

struct Artifact {
  ArtifactKind kind = ArtifactKind::Solve;
  std::string name;      // file name including extension
  std::string content;
};

std::string code_version();
std::string compute_run_id(const RunManifest& m);

// Writes <root>/<run_id>/{manifest.json, constants.json, solves/, fits/, tables/}.
std::filesystem::path persist_run(const std::filesystem::path& root, RunManifest& manifest,
                                  const std::string& constants_json, const std::vector<Artifact>& artifacts);

// ------------------------------------------------------------ serialization

std::string to_json(const ProblemParams& prm);
std::string to_json(const GroundStateResult& r);
std::string to_json(const NormalizedBranchResult& r);
std::string to_json(const RateFit& f);
std::string to_json(const ThresholdResult& r);
std::string to_json(const MonotonicityReport& r);
std::string to_json(const GapSeries& s);
std::string to_json(const MultiplicityTable& t);
std::string field_csv(const RadialField& f);
std::string to_csv(const ThresholdResult& r);
std::string to_csv(const MonotonicityReport& r);
std::string to_csv(const GapSeries& s);
std::string to_csv(const MultiplicityTable& t);
std::string to_csv(const FiberProfile& f);

} // namespace choquard
