#include "choquard/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace choquard::quad {

double gauss16(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 16>::integrate(f, a, b);
}

double graded(const std::function<double(double)>& f, double a, double b, Side bad,
              double min_width, double sing_exp) {
  constexpr double ratio = 0.25;
  const double len = b - a;
  if (len <= 0.0) return 0.0;
  double sum = 0.0;
  double w = len;
  // Sub-panel [x_{k+1}, x_k] measured as distance from the bad endpoint.
  while (w > min_width && w > len * 1e-300) {
    const double lo = w * ratio;
    if (bad == Side::Left)
      sum += gauss16(f, a + lo, a + w);
    else
      sum += gauss16(f, b - w, b - lo);
    w = lo;
  }
  if (sing_exp < 0.0) {
    const double edge = bad == Side::Left ? a + w : b - w;
    return sum + f(edge) * w / (1.0 + sing_exp);
  }
  if (bad == Side::Left)
    sum += gauss16(f, a, a + w);
  else
    sum += gauss16(f, b - w, b);
  return sum;
}

} // namespace choquard::quad
