#pragma once
#include "choquard/grid.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace choquard::riesz {

// Spherical average of A_alpha(N) |x-y|^{-(N-alpha)} over |y| = s, |x| = r,
// multiplied by the sphere area. For alpha <= 1 and r == s the kernel is
// infinite; the value returned there is +inf and is never used by convolve.
double kernel_value(int N, double alpha, double r, double s);

// Precomputed convolution operator on a grid:
//   D_i = sum_j T_ij g_j,   T_ij = K(r_i, r_j) w_j (j != i),
//   T_ii = Phi_i - sum_{j != i} K(r_i, r_j) w_j,  Phi_i = int_0^{r_max} K(r_i, s) s^{N-1} ds.
// Subtracting g(r_i) removes the diagonal singularity; W T stays symmetric.
class KernelTable {
public:
  KernelTable(GridPtr grid, double alpha);
  KernelTable(GridPtr grid, double alpha, std::vector<double> matrix, std::vector<double> phi);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double alpha() const { return alpha_; }
  std::size_t size() const { return n_; }
  const double* row(std::size_t i) const { return matrix_.data() + i * n_; }
  double phi(std::size_t i) const { return phi_[i]; }
  const std::vector<double>& matrix() const { return matrix_; }
  const std::vector<double>& phi_values() const { return phi_; }
  std::uint64_t key() const;

  void apply(const double* g, double* out) const;

private:
  GridPtr grid_;
  double alpha_;
  std::size_t n_;
  std::vector<double> matrix_;
  std::vector<double> phi_;
};

using TablePtr = std::shared_ptr<const KernelTable>;

// Cached per (grid, alpha).
TablePtr kernel_table(const GridPtr& grid, double alpha);
void clear_kernel_cache();

// Row integral int_0^{R} K(r, s) s^{N-1} ds.
double row_integral(int N, double alpha, double r, double R);

RadialField convolve(const RadialGrid& grid, const RadialField& g, double alpha);
// (I_alpha * g) at an arbitrary radius r >= 0 (inside or outside the grid).
double potential_at(const RadialField& g, double alpha, double r);
double interaction_energy(const RadialGrid& grid, const RadialField& u, double p, double alpha);
// Bilinear form integrate((I_alpha * f) g).
double bilinear(const RadialField& f, const RadialField& g, double alpha);

// Binary dump keyed by a hash of (N, alpha, grid).
void save_kernel_table(const KernelTable& t, const std::string& path);
TablePtr load_kernel_table(const std::string& path, const GridPtr& grid, double alpha);

} // namespace choquard::riesz
