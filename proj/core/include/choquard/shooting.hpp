#pragma once
#include "choquard/grid.hpp"

namespace choquard {

struct ShootingOptions {
  double r_max = 30.0;
  int intervals = 3000;
  double grading = 1.0;
  double tol = 1e-12;      // relative bisection tolerance on Q(0)
  double q0_cap = 1e6;     // give up if no overshoot below this
  double match_ratio = 1e-5; // switch to the linear tail once Q < ratio * Q(0)
};

struct ShootingResult {
  RadialField field;
  double q0 = 0;        // Q(0)
  double r_match = 0;   // radius where the linear decaying tail takes over
  int bisections = 0;
};

// Positive radial solution of -Q'' - (N-1)/r Q' + Q = Q^{q-1}, 2 < q < 2N/(N-2).
ShootingResult shoot_local_ground_state(int N, double q, const ShootingOptions& opt = {});

} // namespace choquard
