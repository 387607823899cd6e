#include "pde.hpp"

#include <algorithm>
#include <cmath>

namespace choquard::pde {

Operator::Operator(GridPtr grid, double alpha, double p, double q)
    : grid_(std::move(grid)), n_(static_cast<int>(grid_->size()) - 1), alpha_(alpha), p_(p), q_(q) {
  const int N = grid_->dim();
  std::vector<Eigen::Triplet<double>> trip;
  bnd_ = Vec::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    const auto& st = grid_->stencil(i);
    double diag = 0.0;
    for (int m = 0; m < 5; ++m) {
      const double w = i == 0 ? N * st.d2[m] : st.d2[m] + (N - 1) / grid_->node(i) * st.d1[m];
      const int j = st.idx[m];
      if (j == i) continue;
      diag += w;
      if (j < n_) trip.emplace_back(i, j, -w);
      else bnd_[i] += w;
    }
    trip.emplace_back(i, i, diag);
  }
  neg_lap_.resize(n_, n_);
  neg_lap_.setFromTriplets(trip.begin(), trip.end());
  neg_lap_.makeCompressed();
  neg_lap_rows_ = neg_lap_;
  w_.resize(n_);
  for (int i = 0; i < n_; ++i) w_[i] = grid_->weights()[i] * grid_->sphere_area();
  interior_end_ = 0;
  while (interior_end_ < static_cast<std::size_t>(n_) &&
         grid_->node(interior_end_) <= 0.95 * grid_->r_max())
    ++interior_end_;
}

Vec Operator::apply_neg_laplacian(const Vec& u) const {
  // Difference form: rows near a finely graded origin carry O(1/h^2)
  // coefficients, and summing them against u_i directly loses all digits.
  Vec out(n_);
  for (int i = 0; i < n_; ++i) {
    double s = bnd_[i] * u[i];
    for (decltype(neg_lap_rows_)::InnerIterator it(neg_lap_rows_, i); it; ++it)
      if (it.index() != i) s += it.value() * (u[it.index()] - u[i]);
    out[i] = s;
  }
  return out;
}

Vec Operator::convolve(const Vec& g) const {
  if (!table_) table_ = riesz::kernel_table(grid_, alpha_);
  std::vector<double> full(n_ + 1, 0.0), out(n_ + 1);
  for (int i = 0; i < n_; ++i) full[i] = g[i];
  table_->apply(full.data(), out.data());
  Vec r(n_);
  for (int i = 0; i < n_; ++i) r[i] = out[i];
  return r;
}

Vec Operator::nonlinearity(const Vec& u, double cR, double cP) const {
  Vec f = Vec::Zero(n_);
  if (cR != 0.0) {
    Vec up(n_);
    for (int i = 0; i < n_; ++i) up[i] = std::pow(std::max(u[i], 0.0), p_);
    const Vec D = convolve(up);
    for (int i = 0; i < n_; ++i) f[i] += cR * D[i] * std::pow(std::max(u[i], 0.0), p_ - 1.0);
  }
  if (cP != 0.0)
    for (int i = 0; i < n_; ++i) f[i] += cP * std::pow(std::max(u[i], 0.0), q_ - 1.0);
  return f;
}

Mat Operator::nonlinearity_jacobian(const Vec& u, double cR, double cP) const {
  Mat J = Mat::Zero(n_, n_);
  // Floor keeps u^{p-2} finite for p < 2 at vanishing values.
  const double floor = 1e-300;
  if (cR != 0.0) {
    if (!table_) table_ = riesz::kernel_table(grid_, alpha_);
    Vec up(n_), a(n_), b(n_);
    for (int i = 0; i < n_; ++i) {
      const double x = std::max(u[i], floor);
      up[i] = std::pow(x, p_);
      a[i] = std::pow(x, p_ - 1.0);
      b[i] = p_ * std::pow(x, p_ - 1.0);
    }
    const Vec D = convolve(up);
    for (int i = 0; i < n_; ++i) {
      const double* row = table_->row(i);
      for (int j = 0; j < n_; ++j) J(i, j) = cR * a[i] * row[j] * b[j];
      J(i, i) += cR * (p_ - 1.0) * D[i] * std::pow(std::max(u[i], floor), p_ - 2.0);
    }
  }
  if (cP != 0.0)
    for (int i = 0; i < n_; ++i) J(i, i) += cP * (q_ - 1.0) * std::pow(std::max(u[i], 0.0), q_ - 2.0);
  return J;
}

Vec Operator::residual(const Vec& u, double c, double cR, double cP) const {
  return apply_neg_laplacian(u) + c * u - nonlinearity(u, cR, cP);
}

double Operator::interior_max(const Vec& r) const {
  double m = 0.0;
  for (std::size_t i = 0; i < interior_end_; ++i) m = std::max(m, std::abs(r[i]));
  return m;
}

double Operator::residual_norm(const Vec& u, double c, double cR, double cP) const {
  const double umax = u.cwiseAbs().maxCoeff();
  return umax > 0.0 ? interior_max(residual(u, c, cR, cP)) / umax : 0.0;
}

double Operator::dot(const Vec& a, const Vec& b) const { return (w_.array() * a.array() * b.array()).sum(); }

Vec Operator::from_field(const RadialField& f) const {
  Vec u(n_);
  if (f.grid().same_as(*grid_))
    for (int i = 0; i < n_; ++i) u[i] = f[i];
  else
    for (int i = 0; i < n_; ++i) u[i] = f.at(grid_->node(i));
  return u;
}

RadialField Operator::to_field(const Vec& u) const {
  std::vector<double> v(n_ + 1, 0.0);
  for (int i = 0; i < n_; ++i) v[i] = u[i];
  return RadialField(grid_, std::move(v));
}

std::unique_ptr<Eigen::SparseLU<SpMat>> Operator::shifted_solver(double shift) const {
  SpMat A = neg_lap_;
  for (int i = 0; i < n_; ++i) A.coeffRef(i, i) += shift;
  auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
  lu->compute(A);
  return lu;
}

} // namespace choquard::pde
