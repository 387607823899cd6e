#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/solver.hpp"
#include "pde.hpp"

#include <algorithm>
#include <cmath>

namespace choquard {

double multiplier_coefficient(const ProblemParams& prm) {
  prm.validate();
  if (prm.mode != Mode::Normalized) fail(ErrorKind::InvalidParameter, "multiplier identity needs normalized mode");
  if (prm.critical == CriticalTerm::Hls) {
    const double ts = prm.two_star();
    if (!(prm.q < ts)) fail(ErrorKind::InvalidParameter, "multiplier identity needs q < 2*");
    return 2.0 * (ts - prm.q) / (prm.q * (ts - 2.0));
  }
  if (!(prm.p < prm.two_alpha_star())) fail(ErrorKind::InvalidParameter, "multiplier identity needs p < 2_alpha^*");
  return prm.eta() / (2.0 * prm.p);
}

double multiplier_from_identity(const ProblemParams& prm, const Parts& s) {
  const double c = multiplier_coefficient(prm);
  const double a2 = prm.a * prm.a;
  return prm.critical == CriticalTerm::Hls ? c * prm.nu * s.P / a2 : c * prm.nu * s.R / a2;
}

double multiplier_check(const NormalizedBranchResult& r) {
  const double pred = multiplier_from_identity(r.params, compute_parts(r.params, r.u));
  return std::abs(r.lambda_nu - pred) / std::abs(r.lambda_nu);
}

double rescale_coupling_exponent(const ProblemParams& prm) {
  if (prm.critical == CriticalTerm::Hls) return -(2.0 * prm.N - prm.q * (prm.N - 2.0)) / 4.0;
  return -(prm.N + prm.alpha - prm.p * (prm.N - 2.0)) / 2.0;
}

namespace {

struct FlowState {
  Parts parts;
  std::optional<FiberPoint> point;
};

Parts discrete_parts(const pde::Operator& op, const pde::Vec& u) {
  Parts s;
  s.K = op.dot(op.apply_neg_laplacian(u), u);
  s.M = op.dot(u, u);
  s.R = op.dot(op.nonlinearity(u, 1.0, 0.0), u);
  s.P = op.dot(op.nonlinearity(u, 0.0, 1.0), u);
  return s;
}

std::optional<FiberPoint> fiber_point(const ProblemParams& prm, const Parts& s, Branch b) {
  const auto cls = mass_fiber_classify_parts(prm, s);
  return b == Branch::Minus ? cls.minus : cls.plus;
}

void normalize(const pde::Operator& op, pde::Vec& u, double a) { u *= a / std::sqrt(op.dot(u, u)); }

} // namespace

NormalizedBranchResult normalized_branch(const ProblemParams& prm, const GridPtr& grid, Branch branch,
                                         const InitSpec& init, const NormalizedOptions& opt) {
  prm.validate();
  if (prm.mode != Mode::Normalized) fail(ErrorKind::InvalidParameter, "normalized_branch needs normalized mode");
  if (branch == Branch::Zero) fail(ErrorKind::InvalidParameter, "no solver for the degenerate branch");
  if (grid->dim() != prm.N) fail(ErrorKind::InvalidParameter, "grid dimension does not match N");

  NormalizedBranchResult res;
  res.params = prm;
  res.branch = branch;

  const double a = prm.a;
  const double cR = prm.riesz_coeff(), cP = prm.power_coeff();
  const double eR = 2.0 * prm.p * prm.eta_p() - 2.0, eP = prm.q * prm.gamma_q() - 2.0;

  GridPtr g = grid;
  auto op = std::make_unique<pde::Operator>(g, prm.alpha, prm.p, prm.q);
  RadialField f0 = init.build(g);
  if (f0.is_zero()) fail(ErrorKind::InvalidInitialization, "initial field is identically zero");
  pde::Vec u = op->from_field(f0).cwiseMax(0.0);
  normalize(*op, u, a);

  auto objective = [&](const pde::Vec& v, FlowState& st) {
    st.parts = discrete_parts(*op, v);
    st.point = fiber_point(prm, st.parts, branch);
    return st.point ? st.point->energy : std::numeric_limits<double>::infinity();
  };

  FlowState st;
  double F = objective(u, st);
  if (!st.point) {
    res.note = branch == Branch::Plus ? "fiber has no local minimum (P+ absent)" : "fiber has no P- point";
    res.u = op->to_field(u);
    return res;
  }

  pde::Vec u_prev, h_prev;
  double res_flow = 1.0;
  int k = 0;
  for (; k < opt.max_flow; ++k) {
    const double t = st.point->t;
    if (t > opt.recenter_ratio || t < 1.0 / opt.recenter_ratio) {
      // Dilation-invariant objective: move the iterate onto its fiber point.
      const RadialField cur = op->to_field(u);
      const double amp = std::pow(t, 0.5 * prm.N);
      u = op->from_field(RadialField::from_function(g, [&](double r) { return amp * cur.at(t * r); }))
              .cwiseMax(0.0);
      normalize(*op, u, a);
      F = objective(u, st);
      if (!st.point) break;
      u_prev.resize(0);
      continue;
    }
    const double cRt = cR * std::pow(t, eR), cPt = cP * std::pow(t, eP);
    const pde::Vec G = op->apply_neg_laplacian(u) - op->nonlinearity(u, cRt, cPt);
    const double lam = -op->dot(G, u) / op->dot(u, u);
    const pde::Vec r = G + lam * u;
    res_flow = op->interior_max(r) / u.maxCoeff();
    if (res_flow < opt.flow_switch) break;

    auto lu = op->shifted_solver(std::max(lam, 0.0) + 1e-3);
    const pde::Vec PG = lu->solve(G), Pu = lu->solve(u);
    pde::Vec h = PG - (op->dot(PG, u) / op->dot(Pu, u)) * Pu;

    double tau = 1.0;
    if (u_prev.size()) {
      const pde::Vec s = u - u_prev, y = h - h_prev;
      const double num = op->dot(s, s), den = op->dot(s, y);
      if (den > 0 && num > 0) tau = std::clamp(num / den, 0.1, 10.0);
    }
    bool accepted = false;
    pde::Vec cand;
    FlowState cst;
    double cF = F;
    for (int attempt = 0; attempt < 12; ++attempt) {
      cand = (u - tau * h).cwiseMax(0.0);
      normalize(*op, cand, a);
      cF = objective(cand, cst);
      if (cst.point && cF <= F + 1e-14 * std::abs(F)) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      res.note = "flow step rejected";
      break;
    }
    u_prev = u;
    h_prev = h;
    u = cand;
    F = cF;
    st = cst;
  }
  res.iterations = k;
  if (!st.point) {
    res.note = "fiber point lost during the flow";
    res.u = op->to_field(u);
    return res;
  }

  // Exact move onto the fiber point: u^t on a rescaled grid.
  RadialField field = mass_preserving_dilate(op->to_field(u), st.point->t);
  g = field.grid_ptr();
  op = std::make_unique<pde::Operator>(g, prm.alpha, prm.p, prm.q);
  u = op->from_field(field);
  double lam;
  {
    const pde::Vec G = op->apply_neg_laplacian(u) - op->nonlinearity(u, cR, cP);
    lam = -op->dot(G, u) / op->dot(u, u);
  }

  if (opt.newton) {
    const int n = op->unknowns();
    const double a2 = a * a;
    auto residual = [&](const pde::Vec& v, double l, pde::Vec& F1, double& F2) {
      F1 = op->apply_neg_laplacian(v) + l * v - op->nonlinearity(v, cR, cP);
      F2 = op->dot(v, v) - a2;
    };
    // Smooth merit function for the line search.
    auto norm = [&](const pde::Vec& F1, double F2, double umax) {
      return std::sqrt(F1.squaredNorm() / F1.size() + F2 * F2 / (a2 * a2) * umax * umax) / umax;
    };
    pde::Vec F1;
    double F2;
    residual(u, lam, F1, F2);
    double fn = norm(F1, F2, u.maxCoeff());
    const pde::Mat negL(op->neg_laplacian());
    const pde::Vec& wdiag = op->weights();
    int it = 0;
    for (; it < opt.max_newton; ++it) {
      pde::Mat J(n + 1, n + 1);
      J.setZero();
      J.topLeftCorner(n, n) = negL - op->nonlinearity_jacobian(u, cR, cP);
      J.topLeftCorner(n, n).diagonal().array() += lam;
      J.block(0, n, n, 1) = u;
      J.block(n, 0, 1, n) = (2.0 * wdiag.array() * u.array()).matrix().transpose();
      pde::Vec rhs(n + 1);
      rhs.head(n) = -F1;
      rhs[n] = -F2;
      // Symmetric diagonal scaling; the graded grid makes the raw matrix badly scaled.
      pde::Vec sc(n + 1);
      for (int i = 0; i < n; ++i) sc[i] = 1.0 / std::sqrt(std::max(std::abs(J(i, i)), 1e-12));
      sc[n] = 1.0 / std::sqrt(std::max(J.row(n).head(n).cwiseProduct(sc.head(n).transpose()).norm(), 1e-300));
      J = sc.asDiagonal() * J * sc.asDiagonal();
      const pde::Vec d = sc.cwiseProduct(J.partialPivLu().solve(sc.cwiseProduct(rhs)));
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const pde::Vec tu = u + step * d.head(n);
        const double tl = lam + step * d[n];
        pde::Vec tF1;
        double tF2;
        residual(tu, tl, tF1, tF2);
        const double tn = norm(tF1, tF2, tu.cwiseAbs().maxCoeff());
        if (std::isfinite(tn) && tn < fn) {
          u = tu, lam = tl, F1 = tF1, F2 = tF2, fn = tn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved || fn < 1e-13) break;
    }
    res.iterations += it;
    u = u.cwiseMax(0.0);
  }

  res.u = op->to_field(u);
  res.lambda_nu = lam;
  res.pde_residual =
      op->interior_max(op->apply_neg_laplacian(u) + lam * u - op->nonlinearity(u, cR, cP)) / u.maxCoeff();
  const Parts parts = compute_parts(prm, res.u);
  res.level = total_energy(prm, parts);
  res.fiber_second = normalized_curvature(prm, parts);
  res.multiplier_identity_defect =
      lam != 0.0 ? std::abs(lam - multiplier_from_identity(prm, parts)) / std::abs(lam) : 1.0;
  const bool on_branch = branch == Branch::Minus ? res.fiber_second < 0.0 : res.fiber_second > 0.0;
  const bool mass_ok = std::abs(mass(res.u) - a * a) <= 1e-8 * a * a;
  res.converged = res.pde_residual < opt.residual_tol && on_branch && mass_ok && lam > 0.0 &&
                  res.u.positive_interior();
  if (res.converged) res.note.clear();
  else if (res.note.empty()) {
    res.note = !on_branch ? "returned field left the branch"
               : !mass_ok ? "mass constraint violated"
               : lam <= 0.0 ? "nonpositive multiplier"
                            : "not converged";
  }
  return res;
}

NormalizedBranches normalized_branches(const ProblemParams& prm, const GridPtr& grid,
                                       const std::vector<InitSpec>& schedule, const NormalizedOptions& opt) {
  return normalized_branches(prm, grid, grid, schedule, opt);
}

NormalizedBranches normalized_branches(const ProblemParams& prm, const GridPtr& grid_plus, const GridPtr& grid_minus,
                                       const std::vector<InitSpec>& schedule, const NormalizedOptions& opt) {
  prm.validate();
  NormalizedBranches out;
  const int N = prm.N;
  const bool hls = prm.critical == CriticalTerm::Hls;
  const bool subcritical_mass = hls ? prm.q < 2.0 + 4.0 / N : prm.p < 1.0 + (2.0 + prm.alpha) / N;
  const double x = hls ? prm.nu * std::pow(prm.a, prm.q * (1.0 - prm.gamma_q()))
                       : prm.nu * std::pow(prm.a, 2.0 * prm.p * (1.0 - prm.eta_p()));

  auto run = [&](Branch b, const GridPtr& grid, const std::vector<InitSpec>& inits) {
    std::optional<NormalizedBranchResult> best;
    for (const auto& init : inits) {
      auto r = normalized_branch(prm, grid, b, init, opt);
      if (!best || (r.converged && !best->converged) ||
          (r.converged == best->converged && r.level < best->level))
        best = std::move(r);
    }
    return best;
  };

  if (!subcritical_mass) {
    out.plus_reason = "perturbation is mass-critical or supercritical; no local-minimum branch";
  } else if (opt.smallness_bound && x > *opt.smallness_bound) {
    out.plus_reason = "smallness condition violated";
  } else {
    auto p = run(Branch::Plus, grid_plus, schedule.empty() ? std::vector<InitSpec>{InitSpec::gaussian(4.0)} : schedule);
    if (p && p->converged) out.plus = std::move(p);
    else out.plus_reason = p ? p->note : "no run";
  }

  std::vector<InitSpec> minus_inits = schedule;
  if (minus_inits.empty()) {
    // Short pre-scan of the bubble scale by the fiber-maximum energy.
    double best_e = std::numeric_limits<double>::infinity(), best_eps = 1.0;
    for (double eps : {2.0, 1.0, 0.5, 0.25, 0.12}) {
      auto f = InitSpec::bubble(eps).build(grid_minus);
      f = f.scaled(prm.a / std::sqrt(mass(f)));
      const auto cls = mass_fiber_classify_parts(prm, compute_parts(prm, f));
      if (cls.minus && cls.minus->energy < best_e) best_e = cls.minus->energy, best_eps = eps;
    }
    minus_inits = {InitSpec::bubble(best_eps)};
  }
  out.minus = run(Branch::Minus, grid_minus, minus_inits);
  return out;
}

SecondSolution second_solution_via_rescale(const NormalizedBranchResult& b, double residual_tol) {
  if (!(b.lambda_nu > 0.0)) fail(ErrorKind::RescaleInconsistency, "multiplier must be positive");
  const auto& prm = b.params;
  const int N = prm.N;
  SecondSolution s;
  s.coupling_exponent = rescale_coupling_exponent(prm);
  s.coupling = prm.nu * std::pow(b.lambda_nu, s.coupling_exponent);
  // v(x) = lambda^{-(N-2)/4} u(lambda^{-1/2} x)
  s.field = rescale_field(b.u, std::pow(b.lambda_nu, -0.25 * (N - 2)), std::sqrt(b.lambda_nu));
  if (prm.critical == CriticalTerm::Hls)
    s.params = ProblemParams::lambda_problem(N, prm.alpha, prm.p, prm.q, s.coupling);
  else
    s.params = ProblemParams::mu_problem(N, prm.alpha, prm.p, prm.q, s.coupling);
  const Parts parts = compute_parts(s.params, s.field);
  s.action = total_energy(s.params, parts);
  s.energy = s.action - 0.5 * parts.M;
  s.pde_residual = pde_residual(s.params, s.field);
  if (!(s.pde_residual < residual_tol))
    fail(ErrorKind::RescaleInconsistency, "rescaled field does not solve the frequency-one problem");
  return s;
}

} // namespace choquard
