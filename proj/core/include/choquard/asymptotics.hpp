#pragma once
#include "choquard/functional.hpp"
#include "choquard/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choquard {

// Changes of variables used in the small/large coupling analysis.
//   FrequencyLambda:  w(x) = lambda^{1/(q-2)} v(lambda^{(2*-2)/(2(q-2))} x)       (HLS-critical p)
//   FrequencyMu:      w(x) = mu^{(N-2)/(2(N-2)(p-1)-2 alpha)} v(mu^{1/((N-2)(p-1)-alpha)} x)  (q = 2*)
//   AmplitudeLambda:  w = lambda^{1/(q-2)} v
//   AmplitudeMu:      w = mu^{1/(2(p-1))} v
//   BubbleNormalized: w(x) = xi^{(N-2)/2} v(xi x), xi = concentration_scale(v)
enum class MapTag { FrequencyLambda, FrequencyMu, AmplitudeLambda, AmplitudeMu, BubbleNormalized };
std::string to_string(MapTag t);
MapTag map_tag_from_string(const std::string& s);

struct LedgerCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double rel = 0; // |lhs - rhs| / max(|lhs|, |rhs|)
};

struct RescaleRecord {
  MapTag tag = MapTag::FrequencyLambda;
  double coupling = 1;
  RadialField field;
  double amplitude = 1;  // w = amplitude * v(x * spatial)
  double spatial = 1;
  double xi = 1;         // concentration scale (BubbleNormalized) or 1
  Parts before;
  Parts after;
  std::vector<LedgerCheck> checks;
  double max_ledger_defect = 0;
  double mass_loss = 0;  // relative mass lost to truncation on the target grid
  std::string warning;
};

// Applies the map exactly (values and r_max scaled) or, when `target` is
// given, by interpolation onto it. `prm` supplies N, alpha, p, q.
RescaleRecord rescale_family(const ProblemParams& prm, const RadialField& v, double coupling, MapTag tag,
                             const GridPtr& target = nullptr);

// Peak-matching scale xi = (W_1(0) / w(0))^{2/(N-2)}.
double concentration_scale(const RadialField& w);

struct ConcentrationInfo {
  double xi = 1;
  // False when the field does not decay over the outer part of the grid.
  bool concentrating = true;
};
ConcentrationInfo concentration_info(const RadialField& w);

struct KelvinResult {
  RadialField field;
  // Radii where the transform uses data inside the source grid.
  double r_valid_min = 0;
  double r_valid_max = 0;
};

// K[u](r) = r^{-(N-2)} u(1/r), interpolated onto `target` (defaults to the source grid).
KelvinResult kelvin(const RadialField& u, const GridPtr& target = nullptr);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  double slope_stderr = 0;
  double slope_ci95 = 0; // half width
  std::size_t first = 0;  // window in the sample list
  std::size_t last = 0;   // inclusive
};

enum class FitScale { LogLog, LinLog }; // log y vs log x, or y vs log x

struct RateFit {
  std::vector<double> x; // raw abscissae (coupling or radius), sorted
  std::vector<double> y; // raw values
  FitScale scale = FitScale::LogLog;
  LinearFit fit;                       // reported fit
  std::optional<LinearFit> full;       // all samples, when the window was shrunk
  std::optional<double> expected;
  double rel_error = 0;                // |slope - expected| / |expected|
  bool within(double tol) const;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
                     std::size_t last);

// Slope of log u vs log r on [r1, r2]; the window must span half a decade.
RateFit tail_exponent_fit(const RadialField& u, double r1, double r2);

// Fit of log u + (N-2) log r vs r on [r1, r2]: slope is minus the exponential rate.
RateFit exponential_tail_fit(const RadialField& u, double r1, double r2);

// Log-log (or lin-log) fit of a coupling series; needs >= 4 samples over >= 1.5 decades.
// When R^2 < 0.98 the two extreme samples are dropped and the fit repeated.
RateFit rate_fit(const std::vector<double>& coupling, const std::vector<double>& value,
                 std::optional<double> expected = std::nullopt, FitScale scale = FitScale::LogLog);

} // namespace choquard
