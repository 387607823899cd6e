#pragma once
#include <functional>

namespace choquard::quad {

// 16-point Gauss-Legendre on [a, b].
double gauss16(const std::function<double(double)>& f, double a, double b);

// Integral over [a, b] of a function that is singular or sharply peaked at
// one endpoint. Geometric sub-panels of ratio 1/4 shrink towards the bad
// endpoint until their width falls below `min_width`. The last sub-panel is
// integrated assuming f ~ |x - bad|^{sing_exp} when sing_exp < 0.
enum class Side { Left, Right };
double graded(const std::function<double(double)>& f, double a, double b, Side bad,
              double min_width, double sing_exp = 0.0);

} // namespace choquard::quad
