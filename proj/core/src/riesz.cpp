#include "choquard/riesz.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/quadrature.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace choquard::riesz {
namespace {

void check_alpha(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < N))
    fail(ErrorKind::InvalidParameter, "Riesz order alpha must lie in (0, N)");
}

// Average of |e - rho w|^{-2 beta} over the unit sphere, 0 <= rho < 1.
// Series: 2F1(beta, beta - N/2 + 1; N/2; rho^2).
double sphere_average(int N, double alpha, double rho) {
  const double beta = 0.5 * (N - alpha);
  const double a = beta, b = beta - 0.5 * N + 1.0, c = 0.5 * N;
  if (rho == 0.0 || b == 0.0) return 1.0;
  const double z = rho * rho;
  if (rho <= 0.5) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 400; ++k) {
      term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  if (N == 3) {
    if (alpha == 1.0) return std::log((1.0 + rho) / (1.0 - rho)) / (2.0 * rho);
    return (std::pow(1.0 + rho, alpha - 1.0) - std::pow(1.0 - rho, alpha - 1.0)) /
           (2.0 * rho * (alpha - 1.0));
  }
  if (N == 4 && alpha == 1.0) {
    // int_0^pi sin^2 t (A - B cos t)^{-3/2} dt via complete elliptic integrals.
    const double A = 1.0 + z, B = 2.0 * rho;
    const double k = 2.0 * std::sqrt(rho) / (1.0 + rho);
    const double kp = (1.0 - rho) / (1.0 + rho); // complementary modulus
    double Kk, Ek;
    if (kp < 1e-6) {
      // Near k = 1 the library overflows; use the logarithmic expansions.
      const double L = std::log(4.0 / kp);
      Kk = L + 0.25 * kp * kp * (L - 1.0);
      Ek = 1.0 + 0.5 * kp * kp * (L - 0.5);
    } else {
      Kk = boost::math::ellint_1(k);
      Ek = boost::math::ellint_2(k);
    }
    const double inner = (A / B) * 2.0 * Kk / (1.0 + rho) - (2.0 / B) * (1.0 + rho) * Ek;
    return (2.0 / std::numbers::pi) * (2.0 / B) * inner;
  }
  // Generic: adaptive angular quadrature, graded towards theta = 0 where the
  // integrand peaks with width ~ (1 - rho) / sqrt(rho).
  const double ratio = std::exp(std::lgamma(0.5 * N) - std::lgamma(0.5 * (N - 1))) /
                       std::sqrt(std::numbers::pi);
  const double gap = 1.0 - rho;
  auto f = [&](double t) {
    const double sh = std::sin(0.5 * t);
    const double d2 = gap * gap + 4.0 * rho * sh * sh;
    return std::pow(std::sin(t), N - 2) * std::pow(d2, -beta);
  };
  const double width = 0.05 * gap / std::sqrt(rho);
  return ratio * quad::graded(f, 0.0, std::numbers::pi, quad::Side::Left, width);
}

double kernel_prefactor(int N, double alpha) {
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
  return riesz_normalization(N, alpha) * area;
}

double kernel_unchecked(int N, double alpha, double pref, double r, double s) {
  const double R = std::max(r, s), m = std::min(r, s);
  if (R == 0.0) return std::numeric_limits<double>::infinity();
  if (m == R) {
    if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
    // Limit rho -> 1 of the closed forms.
    if (N == 3) return pref * std::pow(R, alpha - N) * std::pow(2.0, alpha - 1.0) / (2.0 * (alpha - 1.0));
    return pref * std::pow(R, alpha - N) * sphere_average(N, alpha, 1.0 - 1e-15);
  }
  return pref * std::pow(R, alpha - N) * sphere_average(N, alpha, m / R);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t table_key(const RadialGrid& g, double alpha) {
  const int N = g.dim(), n = g.intervals();
  const double rm = g.r_max(), gr = g.grading();
  std::uint64_t h = fnv1a(&N, sizeof N);
  h = fnv1a(&n, sizeof n, h);
  h = fnv1a(&rm, sizeof rm, h);
  h = fnv1a(&gr, sizeof gr, h);
  return fnv1a(&alpha, sizeof alpha, h);
}

} // namespace

double kernel_value(int N, double alpha, double r, double s) {
  check_alpha(N, alpha);
  if (r < 0.0 || s < 0.0) fail(ErrorKind::InvalidParameter, "radii must be nonnegative");
  return kernel_unchecked(N, alpha, kernel_prefactor(N, alpha), r, s);
}

double row_integral(int N, double alpha, double r, double R) {
  check_alpha(N, alpha);
  const double pref = kernel_prefactor(N, alpha);
  if (r == 0.0) return pref * std::pow(R, alpha) / alpha;
  auto f = [&](double s) { return kernel_unchecked(N, alpha, pref, r, s) * std::pow(s, N - 1); };
  // Stop grading at ~1e-14 r (relative resolution of s near r); the last
  // sub-panel uses the local |s - r|^{alpha-1} behaviour when alpha < 1.
  const double tiny = alpha > 1.0 ? 1e-13 : 1e-14;
  const double sing = alpha <= 1.0 ? std::min(alpha - 1.0, -1e-9) : 0.0;
  double total = 0.0;
  const double left_end = std::min(r, R);
  total += quad::graded(f, 0.0, left_end, quad::Side::Right, tiny * left_end, sing);
  if (R > r) {
    const double w = R - r;
    // Beyond a few r the integrand is smooth; grade only the part near r.
    const double near = std::min(w, r);
    total += quad::graded(f, r, r + near, quad::Side::Left, tiny * r, sing);
    double a = r + near;
    while (a < R) {
      const double b = std::min(R, 2.0 * a);
      total += quad::gauss16(f, a, b);
      a = b;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

KernelTable::KernelTable(GridPtr grid, double alpha)
    : grid_(std::move(grid)), alpha_(alpha), n_(grid_->size()) {
  const int N = grid_->dim();
  check_alpha(N, alpha);
  const double pref = kernel_prefactor(N, alpha);
  const auto& r = grid_->nodes();
  const auto& w = grid_->weights();
  std::vector<double> K(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double k = kernel_unchecked(N, alpha, pref, r[i], r[j]);
      K[i * n_ + j] = k;
      K[j * n_ + i] = k;
    }
  phi_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) phi_[i] = row_integral(N, alpha, r[i], grid_->r_max());
  matrix_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double t = K[i * n_ + j] * w[j];
      matrix_[i * n_ + j] = t;
      off += t;
    }
    matrix_[i * n_ + i] = phi_[i] - off;
  }
}

KernelTable::KernelTable(GridPtr grid, double alpha, std::vector<double> matrix,
                         std::vector<double> phi)
    : grid_(std::move(grid)), alpha_(alpha), n_(grid_->size()), matrix_(std::move(matrix)),
      phi_(std::move(phi)) {
  if (matrix_.size() != n_ * n_ || phi_.size() != n_)
    fail(ErrorKind::IncompatibleGrid, "kernel table size does not match grid");
}

std::uint64_t KernelTable::key() const { return table_key(*grid_, alpha_); }

void KernelTable::apply(const double* g, double* out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = matrix_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * g[j];
    out[i] = s;
  }
}

namespace {
std::mutex cache_mutex;
std::map<std::tuple<int, int, double, double, double>, TablePtr> cache;
} // namespace

TablePtr kernel_table(const GridPtr& grid, double alpha) {
  const auto key =
      std::make_tuple(grid->dim(), grid->intervals(), grid->r_max(), grid->grading(), alpha);
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<const KernelTable>(grid, alpha);
  std::lock_guard lock(cache_mutex);
  if (cache.size() > 8) cache.clear();
  cache[key] = t;
  return t;
}

void clear_kernel_cache() {
  std::lock_guard lock(cache_mutex);
  cache.clear();
}

RadialField convolve(const RadialGrid& grid, const RadialField& g, double alpha) {
  require_same_grid(grid, g.grid());
  check_alpha(grid.dim(), alpha);
  auto t = kernel_table(g.grid_ptr(), alpha);
  std::vector<double> out(g.size());
  t->apply(g.values().data(), out.data());
  return RadialField(g.grid_ptr(), std::move(out));
}

double potential_at(const RadialField& g, double alpha, double r) {
  const auto& grid = g.grid();
  const int N = grid.dim();
  check_alpha(N, alpha);
  const double pref = kernel_prefactor(N, alpha);
  const double g0 = r <= grid.r_max() ? g.at(r) : 0.0;
  const auto& w = grid.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.node(j) == r) continue;
    s += kernel_unchecked(N, alpha, pref, r, grid.node(j)) * (g[j] - g0) * w[j];
  }
  if (g0 != 0.0) s += g0 * row_integral(N, alpha, r, grid.r_max());
  return s;
}

double interaction_energy(const RadialGrid& grid, const RadialField& u, double p, double alpha) {
  require_same_grid(grid, u.grid());
  const auto up = u.pow(p);
  return integrate_product(convolve(grid, up, alpha), up);
}

double bilinear(const RadialField& f, const RadialField& g, double alpha) {
  require_same_grid(f.grid(), g.grid());
  return integrate_product(convolve(f.grid(), f, alpha), g);
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'C', 'Q', 'K', 'T', 'A', 'B', '0', '1'};
}

void save_kernel_table(const KernelTable& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot write kernel table: " + path);
  const std::uint64_t key = t.key();
  const std::uint64_t n = t.size();
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char*>(&key), sizeof key);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(t.matrix().data()),
           static_cast<std::streamsize>(t.matrix().size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(t.phi_values().data()),
           static_cast<std::streamsize>(t.phi_values().size() * sizeof(double)));
  if (!os) fail(ErrorKind::Io, "short write: " + path);
}

TablePtr load_kernel_table(const std::string& path, const GridPtr& grid, double alpha) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot read kernel table: " + path);
  char magic[8];
  std::uint64_t key = 0, n = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&key), sizeof key);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(ErrorKind::Io, "not a kernel table: " + path);
  if (key != table_key(*grid, alpha) || n != grid->size())
    fail(ErrorKind::IncompatibleGrid, "kernel table key does not match grid/alpha");
  std::vector<double> m(n * n), phi(n);
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  is.read(reinterpret_cast<char*>(phi.data()), static_cast<std::streamsize>(phi.size() * sizeof(double)));
  if (!is) fail(ErrorKind::Io, "truncated kernel table: " + path);
  return std::make_shared<const KernelTable>(grid, alpha, std::move(m), std::move(phi));
}

} // namespace choquard::riesz
