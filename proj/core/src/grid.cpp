#include "choquard/grid.hpp"

#include "choquard/error.hpp"
#include "choquard/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

namespace choquard {

std::vector<std::vector<double>> fd_weights(double z, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1),
                                     std::vector<double>(x.size(), 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

RadialGrid::RadialGrid(int N, double r_max, int n, double grading)
    : N_(N), r_max_(r_max), n_(n), grading_(grading) {
  if (N < 3) fail(ErrorKind::InvalidConfiguration, "dimension N must be >= 3");
  if (n < 16) fail(ErrorKind::InvalidConfiguration, "node count n must be >= 16");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    fail(ErrorKind::InvalidConfiguration, "r_max must be positive and finite");
  if (!(grading >= 1.0)) fail(ErrorKind::InvalidConfiguration, "grading must be >= 1");

  sphere_area_ = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);

  nodes_.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    nodes_[i] = r_max * std::pow(static_cast<double>(i) / n, grading);
  nodes_[n] = r_max;

  // Product integration in s = (r/r_max)^{1/grading}: f is interpolated by
  // piecewise quadratics in s (linear near the origin, and wherever a
  // quadratic panel would produce a nonpositive weight) and integrated against
  // omega(s) = r^{N-1} dr/ds = r_max^N g s^{gN-1}.
  weights_.assign(nodes_.size(), 0.0);
  const double e = grading * N - 1.0;
  const double scale = std::pow(r_max, N) * grading;
  auto omega = [&](double s) { return scale * std::pow(s, e); };
  auto s_of = [&](int i) { return static_cast<double>(i) / n; };
  auto linear = [&](int i0) {
    const double a = s_of(i0), b = s_of(i0 + 1);
    weights_[i0] += quad::gauss16([&](double s) { return (b - s) / (b - a) * omega(s); }, a, b);
    weights_[i0 + 1] += quad::gauss16([&](double s) { return (s - a) / (b - a) * omega(s); }, a, b);
  };
  auto panel = [&](int i0, double a, double b) {
    const double x0 = s_of(i0), x1 = s_of(i0 + 1), x2 = s_of(i0 + 2);
    const double q0 = quad::gauss16(
        [&](double s) { return (s - x1) * (s - x2) / ((x0 - x1) * (x0 - x2)) * omega(s); }, a, b);
    const double q1 = quad::gauss16(
        [&](double s) { return (s - x0) * (s - x2) / ((x1 - x0) * (x1 - x2)) * omega(s); }, a, b);
    const double q2 = quad::gauss16(
        [&](double s) { return (s - x0) * (s - x1) / ((x2 - x0) * (x2 - x1)) * omega(s); }, a, b);
    if (q0 <= 0.0 || q1 <= 0.0 || q2 <= 0.0) {
      linear(i0);
      linear(i0 + 1);
      return;
    }
    weights_[i0] += q0;
    weights_[i0 + 1] += q1;
    weights_[i0 + 2] += q2;
  };
  // One or two leading linear intervals so the quadratic pairs end at n.
  const int lead = n % 2 == 1 ? 1 : 2;
  for (int k = 0; k < lead; ++k) linear(k);
  for (int k = lead; k + 2 <= n; k += 2) panel(k, s_of(k), s_of(k + 2));

  // Five-point stencils on the evenly extended node set.
  stencils_.resize(nodes_.size());
  for (int i = 0; i <= n; ++i) {
    int lo = i - 2;
    if (lo + 4 > n) lo = n - 4;
    std::vector<double> x(5);
    Stencil st{};
    for (int m = 0; m < 5; ++m) {
      const int j = lo + m;
      st.idx[m] = std::abs(j);
      x[m] = j < 0 ? -nodes_[-j] : nodes_[j];
    }
    const auto w = fd_weights(nodes_[i], x, 2);
    for (int m = 0; m < 5; ++m) {
      st.d1[m] = i == 0 ? 0.0 : w[1][m];
      st.d2[m] = w[2][m];
    }
    stencils_[i] = st;
  }
}

std::size_t RadialGrid::locate(double r) const {
  if (r <= 0.0) return 0;
  if (r >= r_max_) return static_cast<std::size_t>(n_ - 1);
  auto k = static_cast<long>(std::floor(n_ * std::pow(r / r_max_, 1.0 / grading_)));
  k = std::clamp(k, 0L, static_cast<long>(n_ - 1));
  while (k > 0 && nodes_[k] > r) --k;
  while (k < n_ - 1 && nodes_[k + 1] <= r) ++k;
  return static_cast<std::size_t>(k);
}

bool RadialGrid::same_as(const RadialGrid& o) const {
  return this == &o ||
         (N_ == o.N_ && n_ == o.n_ && r_max_ == o.r_max_ && grading_ == o.grading_);
}

std::string RadialGrid::describe() const {
  std::ostringstream os;
  os << "N=" << N_ << " r_max=" << r_max_ << " n=" << n_ << " grading=" << grading_;
  return os.str();
}

GridPtr make_grid(int N, double r_max, int n, double grading) {
  return std::make_shared<const RadialGrid>(N, r_max, n, grading);
}

// ---------------------------------------------------------------------------

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorKind::InvalidConfiguration, "field without grid");
  if (values_.size() != grid_->size())
    fail(ErrorKind::IncompatibleGrid, "value count does not match grid size");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidParameter, "non-finite field value");
}

RadialField RadialField::from_function(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return RadialField(std::move(grid), std::move(v));
}

RadialField RadialField::zeros(GridPtr grid) {
  std::vector<double> v(grid->size(), 0.0);
  return RadialField(std::move(grid), std::move(v));
}

double RadialField::at(double r) const {
  const auto& g = *grid_;
  r = std::abs(r);
  if (r > g.r_max()) return 0.0;
  const std::size_t k = g.locate(r);
  if (g.node(k) == r) return values_[k];
  if (g.node(k + 1) == r) return values_[k + 1];
  const int n = g.intervals();
  int lo = static_cast<int>(k) - 1;
  if (lo + 3 > n) lo = n - 3;
  double x[4], y[4];
  for (int m = 0; m < 4; ++m) {
    const int j = lo + m;
    x[m] = j < 0 ? -g.node(-j) : g.node(j);
    y[m] = values_[std::abs(j)];
  }
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (r - x[b]) / (x[a] - x[b]);
    s += l * y[a];
  }
  return s;
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool RadialField::is_zero() const { return max_abs() == 0.0; }

bool RadialField::tail_flag(double floor) const {
  const double peak = max_abs();
  if (peak == 0.0) return true;
  double tail = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (grid_->node(i) >= 0.95 * grid_->r_max()) tail = std::max(tail, std::abs(values_[i]));
  return tail <= floor * peak;
}

bool RadialField::positive_interior() const {
  for (std::size_t i = 0; i + 1 < values_.size(); ++i)
    if (!(values_[i] > 0.0)) return false;
  return true;
}

bool RadialField::nonincreasing(double rel_tol) const {
  const double tol = rel_tol * max_abs();
  for (std::size_t i = 0; i + 1 < values_.size(); ++i)
    if (values_[i + 1] > values_[i] + tol) return false;
  return true;
}

RadialField RadialField::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return RadialField(grid_, std::move(v));
}

RadialField RadialField::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
  return RadialField(grid_, std::move(v));
}

RadialField RadialField::pow(double e) const {
  return map([e](double x) { return std::pow(std::abs(x), e); });
}

// ---------------------------------------------------------------------------

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (!a.same_as(b))
    fail(ErrorKind::IncompatibleGrid, "grid mismatch: " + a.describe() + " vs " + b.describe());
}

double integrate(const RadialField& f) {
  const auto& g = f.grid();
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return g.sphere_area() * s;
}

double integrate(const RadialGrid& grid, const RadialField& f) {
  require_same_grid(grid, f.grid());
  return integrate(f);
}

double integrate_product(const RadialField& f, const RadialField& g) {
  require_same_grid(f.grid(), g.grid());
  const auto& w = f.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * g[i];
  return f.grid().sphere_area() * s;
}

double lp_norm_pow(const RadialField& u, double p) {
  const auto& w = u.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), p);
  return u.grid().sphere_area() * s;
}

double mass(const RadialField& u) { return integrate_product(u, u); }

RadialField derivative(const RadialField& f) {
  const auto& g = f.grid();
  std::vector<double> d(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto& st = g.stencil(i);
    double s = 0.0;
    for (int m = 0; m < 5; ++m) s += st.d1[m] * (f[st.idx[m]] - f[i]);
    d[i] = s;
  }
  return RadialField(f.grid_ptr(), std::move(d));
}

double gradient_seminorm(const RadialField& f) {
  const auto d = derivative(f);
  return integrate_product(d, d);
}

RadialField apply_radial_laplacian(const RadialGrid& grid, const RadialField& f) {
  require_same_grid(grid, f.grid());
  if (grid.size() < 3) fail(ErrorKind::InvalidConfiguration, "fewer than 3 nodes");
  const int N = grid.dim();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& st = grid.stencil(i);
    double d1 = 0.0, d2 = 0.0;
    // Weights sum to zero; differencing against f_i keeps constants exact.
    for (int m = 0; m < 5; ++m) {
      d1 += st.d1[m] * (f[st.idx[m]] - f[i]);
      d2 += st.d2[m] * (f[st.idx[m]] - f[i]);
    }
    out[i] = i == 0 ? N * d2 : d2 + (N - 1) / grid.node(i) * d1;
  }
  return RadialField(f.grid_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& os, const RadialField& f) {
  os << "r,u\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) os << f.grid().node(i) << ',' << f[i] << '\n';
}

std::string grid_header_json(const RadialGrid& grid) {
  nlohmann::json j;
  j["N"] = grid.dim();
  j["r_max"] = grid.r_max();
  j["n"] = grid.intervals();
  j["grading"] = grid.grading();
  return j.dump();
}

GridPtr grid_from_header_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return make_grid(j.at("N").get<int>(), j.at("r_max").get<double>(), j.at("n").get<int>(),
                     j.at("grading").get<double>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfiguration, std::string("bad grid header: ") + e.what());
  }
}

RadialField read_csv(std::istream& is, GridPtr grid) {
  std::string line;
  std::getline(is, line); // header
  std::vector<double> v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorKind::Io, "malformed CSV line: " + line);
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  return RadialField(std::move(grid), std::move(v));
}

} // namespace choquard
