#pragma once
// Discrete operators shared by the ground-state and normalized solvers.
// Unknowns are the nodal values u_0..u_{n-1}; node n carries u = 0.

#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>

namespace choquard::pde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

class Operator {
public:
  Operator(GridPtr grid, double alpha, double p, double q);

  const GridPtr& grid() const { return grid_; }
  int unknowns() const { return n_; }

  // -Laplacian restricted to the unknowns.
  const SpMat& neg_laplacian() const { return neg_lap_; }
  Vec apply_neg_laplacian(const Vec& u) const;

  // c_R (I*u_+^p) u_+^{p-1} + c_P u_+^{q-1}
  Vec nonlinearity(const Vec& u, double cR, double cP) const;
  // Its Jacobian (dense).
  Mat nonlinearity_jacobian(const Vec& u, double cR, double cP) const;

  // -Lu + c u - nonlinearity
  Vec residual(const Vec& u, double c, double cR, double cP) const;
  // max |residual| over nodes with r <= 0.95 r_max, divided by max |u|
  double residual_norm(const Vec& u, double c, double cR, double cP) const;
  double interior_max(const Vec& r) const;

  // Weighted L2 inner product (sphere area included).
  double dot(const Vec& a, const Vec& b) const;
  const Vec& weights() const { return w_; }

  Vec from_field(const RadialField& f) const;
  RadialField to_field(const Vec& u) const;

  // Sparse factorization of -L + shift.
  std::unique_ptr<Eigen::SparseLU<SpMat>> shifted_solver(double shift) const;

private:
  Vec convolve(const Vec& g) const;

  GridPtr grid_;
  int n_;
  double alpha_, p_, q_;
  SpMat neg_lap_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> neg_lap_rows_;
  Vec bnd_; // coefficient of the Dirichlet node in each row
  Vec w_;
  std::size_t interior_end_;
  mutable riesz::TablePtr table_;
};

} // namespace choquard::pde
