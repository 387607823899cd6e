#include "choquard/solver.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace choquard {

InitSpec InitSpec::gaussian(double width) {
  InitSpec s;
  s.kind = Kind::Gaussian;
  s.scale = width;
  return s;
}

InitSpec InitSpec::bubble(double eps) {
  InitSpec s;
  s.kind = Kind::Bubble;
  s.scale = eps;
  return s;
}

InitSpec InitSpec::supplied(RadialField f) {
  InitSpec s;
  s.kind = Kind::Supplied;
  s.field = std::move(f);
  return s;
}

std::string InitSpec::tag() const {
  std::ostringstream os;
  switch (kind) {
  case Kind::Gaussian: os << "gaussian(" << scale << ")"; break;
  case Kind::Bubble: os << "bubble(" << scale << ")"; break;
  case Kind::Supplied: os << "supplied"; break;
  }
  return os.str();
}

RadialField InitSpec::build(const GridPtr& grid) const {
  const int N = grid->dim();
  switch (kind) {
  case Kind::Gaussian:
    if (!(scale > 0)) fail(ErrorKind::InvalidInitialization, "gaussian width must be positive");
    return RadialField::from_function(grid, [&](double r) { return std::exp(-r * r / (scale * scale)); });
  case Kind::Bubble: {
    if (!(scale > 0)) fail(ErrorKind::InvalidInitialization, "bubble epsilon must be positive");
    const double amp = std::pow(scale, -0.5 * (N - 2));
    return RadialField::from_function(
        grid, [&](double r) { return amp * talenti_value(N, r / scale) * std::exp(-r); });
  }
  case Kind::Supplied:
    if (field.empty()) fail(ErrorKind::InvalidInitialization, "no field supplied");
    if (field.grid().same_as(*grid)) return field;
    return RadialField::from_function(grid, [&](double r) { return field.at(r); });
  }
  fail(ErrorKind::InvalidInitialization, "unknown initialization");
}

std::vector<InitSpec> default_schedule() {
  return {InitSpec::gaussian(1.0), InitSpec::bubble(0.5), InitSpec::bubble(0.1)};
}

double pde_residual(const ProblemParams& prm, const RadialField& u) {
  pde::Operator op(u.grid_ptr(), prm.alpha, prm.p, prm.q);
  return op.residual_norm(op.from_field(u), 1.0, prm.riesz_coeff(), prm.power_coeff());
}

namespace {

struct Discrete {
  const pde::Operator& op;
  double cR, cP, p, q;

  // Quadratic part <(-L+1)u, u>, Choquard part <D(u^p) u^{p-1}, u>, local part.
  void parts(const pde::Vec& u, double& A, double& B, double& C) const {
    const pde::Vec pu = op.apply_neg_laplacian(u) + u;
    A = op.dot(pu, u);
    B = cR != 0.0 ? op.dot(op.nonlinearity(u, cR, 0.0), u) : 0.0;
    C = cP != 0.0 ? op.dot(op.nonlinearity(u, 0.0, cP), u) : 0.0;
  }
  double level(const pde::Vec& u) const {
    double A, B, C;
    parts(u, A, B, C);
    return 0.5 * A - B / (2.0 * p) - C / q;
  }
  double project(pde::Vec& u) const {
    double A, B, C;
    parts(u, A, B, C);
    const double t = nehari_root(A, B, C, p, q);
    u *= t;
    return t;
  }
};

bool field_ok(const pde::Vec& u) {
  const double m = u.maxCoeff();
  return std::isfinite(m) && m > 0.0 && u.minCoeff() > -1e-8 * m;
}

} // namespace

GroundStateResult ground_state_single(const ProblemParams& prm, const GridPtr& grid,
                                      const InitSpec& init, const SolverOptions& opt) {
  prm.validate();
  if (prm.mode == Mode::Normalized)
    fail(ErrorKind::InvalidParameter, "ground_state expects a frequency-one mode");
  if (grid->dim() != prm.N) fail(ErrorKind::InvalidParameter, "grid dimension does not match N");
  const RadialField f0 = init.build(grid);
  if (f0.is_zero()) fail(ErrorKind::InvalidInitialization, "initial field is identically zero");

  pde::Operator op(grid, prm.alpha, prm.p, prm.q);
  const double cR = prm.riesz_coeff(), cP = prm.power_coeff();
  Discrete d{op, cR, cP, prm.p, prm.q};

  GroundStateResult res;
  res.params = prm;
  res.init = init.tag();

  pde::Vec u = op.from_field(f0).cwiseMax(0.0);
  if (u.maxCoeff() <= 0.0) fail(ErrorKind::InvalidInitialization, "initial field has no positive part");
  d.project(u);

  auto lu = op.shifted_solver(1.0);
  const pde::SpMat P = [&] {
    pde::SpMat A = op.neg_laplacian();
    for (int i = 0; i < op.unknowns(); ++i) A.coeffRef(i, i) += 1.0;
    return A;
  }();

  // Residual against the size of the linear part, so a concentrated profile
  // (where max |u| understates -Lu + u) can reach the Newton stage.
  auto scaled = [&](const pde::Vec& v, double r) { return r * v.maxCoeff() / (P * v).cwiseAbs().maxCoeff(); };

  double level = d.level(u);
  pde::Vec u_prev, g_prev;
  int stagnant = 0;
  int k = 0;
  double res_norm = op.residual_norm(u, 1.0, cR, cP);
  for (; k < opt.max_descent; ++k) {
    if (res_norm < opt.residual_tol) break;
    if (opt.newton && scaled(u, res_norm) < opt.newton_switch) break;
    const pde::Vec g = u - lu->solve(op.nonlinearity(u, cR, cP));
    double tau = 1.0;
    if (u_prev.size()) {
      const pde::Vec s = u - u_prev, y = g - g_prev;
      const pde::Vec Ps = P * s;
      const double num = s.dot(Ps), den = y.dot(Ps);
      if (den > 0.0 && num > 0.0) tau = std::clamp(num / den, 0.2, 4.0);
    }
    pde::Vec cand;
    double cand_level = level;
    bool accepted = false;
    for (int attempt = 0; attempt < 6; ++attempt) {
      cand = (u - tau * g).cwiseMax(0.0);
      if (cand.maxCoeff() <= 0.0) {
        tau *= 0.5;
        continue;
      }
      d.project(cand);
      cand_level = d.level(cand);
      if (cand_level <= level + 1e-13 * std::abs(level)) {
        accepted = true;
        break;
      }
      tau = attempt == 0 ? std::min(tau, 1.0) : 0.5 * tau;
    }
    if (!accepted) {
      res.note = "descent step rejected";
      break;
    }
    u_prev = u;
    g_prev = g;
    u = cand;
    stagnant = std::abs(cand_level - level) < opt.level_tol * std::abs(level) ? stagnant + 1 : 0;
    level = cand_level;
    res_norm = op.residual_norm(u, 1.0, cR, cP);
    if (stagnant > 50 && !opt.newton) break;
  }
  res.iterations = k;

  if (opt.newton && scaled(u, res_norm) < std::max(opt.newton_switch, 10 * opt.residual_tol)) {
    pde::Vec v = u;
    double fnorm = op.residual(v, 1.0, cR, cP).cwiseAbs().maxCoeff();
    int it = 0;
    for (; it < opt.max_newton; ++it) {
      const pde::Vec F = op.residual(v, 1.0, cR, cP);
      pde::Mat J = -op.nonlinearity_jacobian(v, cR, cP);
      J += pde::Mat(P);
      const pde::Vec delta = J.partialPivLu().solve(-F);
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const pde::Vec trial = v + step * delta;
        const double tn = op.residual(trial, 1.0, cR, cP).cwiseAbs().maxCoeff();
        if (std::isfinite(tn) && tn < fnorm) {
          v = trial;
          fnorm = tn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved || fnorm < 1e-14 * v.cwiseAbs().maxCoeff()) break;
    }
    res.iterations += it;
    if (field_ok(v) && op.residual_norm(v, 1.0, cR, cP) < res_norm) {
      u = v.cwiseMax(0.0);
    } else {
      res.note = "newton polish rejected";
    }
  }

  res.u = op.to_field(u);
  res.pde_residual = op.residual_norm(u, 1.0, cR, cP);
  const Parts parts = compute_parts(prm, res.u);
  res.level = total_energy(prm, parts);
  res.defects = defects_from_parts(prm, parts);
  res.positive = res.u.positive_interior();
  res.monotone = res.u.nonincreasing(1e-6);
  res.converged = res.pde_residual < opt.residual_tol && std::abs(res.defects.nehari_rel) < opt.defect_tol &&
                  std::abs(res.defects.pohozaev_rel) < opt.defect_tol && res.positive && res.monotone;
  if (!res.converged && res.note.empty()) res.note = "not converged";
  return res;
}

GroundStateResult ground_state(const ProblemParams& prm, const GridPtr& grid,
                               const std::vector<InitSpec>& schedule, const SolverOptions& opt) {
  if (schedule.empty()) fail(ErrorKind::InvalidInitialization, "empty initialization schedule");
  std::optional<GroundStateResult> best;
  for (const auto& init : schedule) {
    auto r = ground_state_single(prm, grid, init, opt);
    if (!best) {
      best = std::move(r);
      continue;
    }
    const bool better = (r.converged && !best->converged) ||
                        (r.converged == best->converged && r.level < best->level);
    if (better) best = std::move(r);
  }
  return *best;
}

} // namespace choquard
