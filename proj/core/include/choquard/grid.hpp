#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace choquard {

// Radial grid on [0, r_max] with nodes r_i = r_max (i/n)^grading, i = 0..n.
// Node 0 is the origin (the virtual node); node n carries the Dirichlet value.
class RadialGrid {
public:
  struct Stencil {
    std::array<int, 5> idx;    // value indices (mirrored nodes map to |index|)
    std::array<double, 5> d1;  // first derivative weights
    std::array<double, 5> d2;  // second derivative weights
  };

  RadialGrid(int N, double r_max, int n, double grading);

  int dim() const { return N_; }
  double r_max() const { return r_max_; }
  int intervals() const { return n_; }
  double grading() const { return grading_; }
  std::size_t size() const { return nodes_.size(); }
  double node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  // Weights for the radial integral of f(r) r^{N-1} dr on [0, r_max].
  const std::vector<double>& weights() const { return weights_; }
  double sphere_area() const { return sphere_area_; }
  const Stencil& stencil(std::size_t i) const { return stencils_[i]; }

  // Index of the interval [r_k, r_{k+1}] containing r (clamped).
  std::size_t locate(double r) const;
  bool same_as(const RadialGrid& other) const;
  std::string describe() const;

private:
  int N_;
  double r_max_;
  int n_;
  double grading_;
  double sphere_area_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<Stencil> stencils_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int N, double r_max, int n, double grading = 2.0);

// Finite-difference weights (Fornberg) for derivatives 0..m at z.
std::vector<std::vector<double>> fd_weights(double z, const std::vector<double>& x, int m);

class RadialField {
public:
  RadialField() = default;
  RadialField(GridPtr grid, std::vector<double> values);
  static RadialField from_function(GridPtr grid, const std::function<double(double)>& f);
  static RadialField zeros(GridPtr grid);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool empty() const { return !grid_; }

  // Local cubic interpolation with even extension at the origin; exact at nodes.
  // Returns 0 beyond r_max.
  double at(double r) const;
  double max_abs() const;
  bool is_zero() const;
  // True when max |u| over the outer 5% of the radius is below floor * max|u|.
  bool tail_flag(double floor = 1e-8) const;
  bool positive_interior() const;
  bool nonincreasing(double rel_tol = 1e-8) const;

  RadialField scaled(double c) const;
  RadialField map(const std::function<double(double)>& f) const;
  RadialField pow(double e) const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

// sphere_area * sum_i w_i f_i.
double integrate(const RadialField& f);
double integrate(const RadialGrid& grid, const RadialField& f);
// Product integral of f*g.
double integrate_product(const RadialField& f, const RadialField& g);
double lp_norm_pow(const RadialField& u, double p); // integral of |u|^p
double mass(const RadialField& u);                  // integral of u^2

RadialField derivative(const RadialField& f);
double gradient_seminorm(const RadialField& f); // integral of |grad f|^2
RadialField apply_radial_laplacian(const RadialGrid& grid, const RadialField& f);

// Two-column CSV (r, u) and a JSON grid header.
void write_csv(std::ostream& os, const RadialField& f);
std::string grid_header_json(const RadialGrid& grid);
GridPtr grid_from_header_json(const std::string& text);
RadialField read_csv(std::istream& is, GridPtr grid);

} // namespace choquard
