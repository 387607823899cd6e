#pragma once
#include "choquard/asymptotics.hpp"
#include "choquard/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choquard {

// Cut-off Talenti bubble V(r) = eps^{-(N-2)/2} W_1(r/eps) phi(r/R).
struct BubbleSpec {
  int N = 3;
  double eps = 0.1;
  double R = 1.0;
  std::optional<double> a; // target mass, informational
};

// 1 on [0,1], 0 on [2, inf), quintic smoothstep in between.
double cutoff_profile(double s);

void validate(const BubbleSpec& spec);
RadialField bubble(const BubbleSpec& spec, const GridPtr& grid);
// Graded grid covering [0, 2R] with about 24 nodes inside [0, eps].
GridPtr bubble_grid(const BubbleSpec& spec, int n = 800);

// |V|_2^2 by adaptive quadrature of the closed form.
double bubble_mass(int N, double eps, double R);
// R with |V|_2^2 = a^2 (N = 3 or 4).
double mass_radius(int N, double a, double eps);
// Refines R (starting from spec.R) so that the grid mass of the bubble equals a^2.
double grid_mass_radius(const BubbleSpec& spec, const GridPtr& grid, double a);

struct BubbleReport {
  int N = 3;
  double eps = 0;
  double R = 0;
  double q = 0, p = 0, alpha = 0;
  double kinetic = 0;        // |grad V|_2^2
  double mass = 0;           // |V|_2^2
  double power = 0;          // |V|_q^q
  double riesz = 0;          // int (I_alpha * V^p) V^p
  double critical_power = 0; // |V|_{2*}^{2*}
  double kinetic_dev = 0;    // kinetic / S^{N/2} - 1
  double critical_dev = 0;   // critical_power / S^{N/2} - 1
};

BubbleReport bubble_report(const RadialField& V, double eps, double R, double q, double p, double alpha);

enum class PowerRegime { Algebraic, Logarithmic, FarField };
std::string to_string(PowerRegime r);

struct PowerRate {
  PowerRegime regime = PowerRegime::Algebraic;
  double exponent = 0; // eps exponent (times ln(1/eps) in the logarithmic regime)
};
// Small-eps behaviour of |V|_q^q with R calibrated to a fixed mass.
PowerRate power_rate(int N, double q);
// eps exponent of the Riesz term, N + alpha - p(N-2).
double riesz_rate(int N, double alpha, double p);

struct BubbleSweep {
  std::vector<BubbleReport> rows;
  PowerRate expected_power;
  double expected_riesz = 0;
  RateFit power_fit;  // log |V|_q^q vs log eps (logarithmic regime: |V|_q^q / eps^{3/2} vs ln eps)
  RateFit riesz_fit;
};

// Sweep over eps with R = mass_radius(N, a, eps) and a graded grid of n intervals.
BubbleSweep bubble_sweep(int N, double a, const std::vector<double>& eps, double q, double p, double alpha,
                         int n = 800);

} // namespace choquard
