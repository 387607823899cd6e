#include "choquard/shooting.hpp"

#include "choquard/error.hpp"

#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace choquard {

namespace {

using State = std::array<double, 2>;
namespace ode = boost::numeric::odeint;

enum class Outcome { Overshoot, Undershoot, Undecided };

struct Rhs {
  int N;
  double q;
  void operator()(const State& y, State& dy, double r) const {
    const double Q = y[0];
    dy[0] = y[1];
    dy[1] = -(N - 1.0) / r * y[1] + Q - std::pow(std::max(Q, 0.0), q - 1.0);
  }
};

State series_start(int N, double q, double a, double r0) {
  const double b = (a - std::pow(a, q - 1.0)) / N;
  return {a + 0.5 * b * r0 * r0, b * r0};
}

constexpr double kStart = 1e-5;

// Integrates from the origin until the trajectory crosses zero (Q(0) too
// large) or turns upward (too small). Optionally samples Q at given radii.
Outcome classify(int N, double q, double a, double r_end, const std::vector<double>* at = nullptr,
                 std::vector<double>* out = nullptr) {
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  State y = series_start(N, q, a, kStart);
  stepper.initialize(y, kStart, 1e-4);
  std::size_t k = 0;
  Rhs rhs{N, q};
  while (stepper.current_time() < r_end) {
    stepper.do_step(rhs);
    const double t = stepper.current_time();
    if (at) {
      while (k < at->size() && (*at)[k] <= t) {
        State s;
        const double rr = std::max((*at)[k], kStart);
        if (rr <= kStart) s = series_start(N, q, a, 0.0);
        else stepper.calc_state(rr, s);
        out->push_back(s[0]);
        ++k;
      }
    }
    const State& c = stepper.current_state();
    if (c[0] < 0.0) return Outcome::Overshoot;
    if (c[1] > 0.0) return Outcome::Undershoot;
  }
  return Outcome::Undecided;
}

} // namespace

ShootingResult shoot_local_ground_state(int N, double q, const ShootingOptions& opt) {
  if (N < 3) fail(ErrorKind::InvalidParameter, "shooting needs N >= 3");
  const double ts = 2.0 * N / (N - 2.0);
  if (!(q > 2.0 && q < ts)) fail(ErrorKind::InvalidParameter, "shooting needs 2 < q < 2N/(N-2)");
  const double r_end = 60.0;

  double lo = 1.0, hi = 2.0;
  while (classify(N, q, hi, r_end) != Outcome::Overshoot) {
    lo = hi;
    hi *= 2.0;
    if (hi > opt.q0_cap) fail(ErrorKind::ShootingFailure, "no overshooting value of Q(0) found");
  }
  ShootingResult res;
  while (hi - lo > opt.tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const auto o = classify(N, q, mid, r_end);
    if (o == Outcome::Overshoot) hi = mid;
    else if (o == Outcome::Undershoot) lo = mid;
    else break;
    ++res.bisections;
  }
  res.q0 = 0.5 * (lo + hi);

  auto grid = make_grid(N, opt.r_max, opt.intervals, opt.grading);
  const auto& r = grid->nodes();
  std::vector<double> vals;
  classify(N, q, res.q0, r.back() + 1.0, &r, &vals);
  if (vals.empty()) fail(ErrorKind::ShootingFailure, "shooting trajectory left the admissible region");
  vals[0] = res.q0;

  // Past the matching radius the linear equation -Q'' - (N-1)/r Q' + Q = 0
  // governs; its decaying solution is r^{1-N/2} K_{N/2-1}(r).
  std::size_t m = 1;
  while (m < vals.size() && vals[m] > opt.match_ratio * res.q0) ++m;
  if (m >= vals.size()) m = vals.size() - 1;
  const double nu = 0.5 * N - 1.0;
  auto tail = [&](double x) {
    return std::pow(x, -nu) * boost::math::cyl_bessel_k(nu, x);
  };
  res.r_match = r[m];
  const double c = vals[m] / tail(r[m]);
  vals.resize(r.size());
  for (std::size_t i = m + 1; i < r.size(); ++i) vals[i] = c * tail(r[i]);
  vals.back() = 0.0;
  res.field = RadialField(grid, std::move(vals));
  return res;
}

} // namespace choquard
