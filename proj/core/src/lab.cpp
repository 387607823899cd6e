#include "choquard/lab.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/shooting.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef CHOQUARD_VERSION
#define CHOQUARD_VERSION "0.0.0"
#endif

namespace choquard {

using nlohmann::json;

ProblemParams with_coupling(const ProblemParams& family, double c) {
  ProblemParams p = family;
  switch (family.mode) {
  case Mode::Lambda: p.lambda = c; break;
  case Mode::Mu: p.mu = c; break;
  default: fail(ErrorKind::InvalidParameter, "coupling scans need the lambda or mu family");
  }
  return p;
}

double coupling_of(const ProblemParams& prm) {
  switch (prm.mode) {
  case Mode::Lambda: return prm.lambda;
  case Mode::Mu: return prm.mu;
  case Mode::Normalized: return prm.nu;
  case Mode::General: break;
  }
  fail(ErrorKind::InvalidParameter, "general mode has two couplings");
}

double threshold_level(const ProblemParams& family) {
  const int N = family.N;
  if (family.mode == Mode::Lambda && std::abs(family.p - family.two_alpha_star()) < 1e-12) {
    const auto W = talenti_field(make_grid(N, 2000.0, 2000, 3.0));
    return crit_level_hls(N, family.alpha, hls_quotient(W, family.alpha));
  }
  if (family.mode == Mode::Mu && std::abs(family.q - family.two_star()) < 1e-12)
    return crit_level_sob(N, sobolev_constant_analytic(N));
  fail(ErrorKind::InvalidParameter,
       "threshold scans need an upper-critical p in the lambda family or q = 2* in the mu family");
}

// ---------------------------------------------------------------- threshold

namespace {

RadialField transfer(const RadialField& f, const GridPtr& grid) {
  if (f.grid().same_as(*grid)) return f;
  return RadialField::from_function(grid, [&](double r) { return f.at(r); });
}

std::vector<InitSpec> warm_schedule(const std::optional<RadialField>& warm, const GridPtr& grid) {
  std::vector<InitSpec> s;
  if (warm) s.push_back(InitSpec::supplied(transfer(*warm, grid)));
  for (auto& x : default_schedule()) s.push_back(x);
  return s;
}

struct Evaluation {
  ScanPoint point;
  RadialField field;
};

Evaluation evaluate(const ProblemParams& family, const GridPtr& grid, double c, const std::optional<RadialField>& warm,
                    double crit, double delta, const SolverOptions& opt) {
  const auto r = ground_state(with_coupling(family, c), grid, warm_schedule(warm, grid), opt);
  Evaluation e;
  e.point.coupling = c;
  e.point.level = r.level;
  e.point.pde_residual = r.pde_residual;
  e.point.converged = r.converged;
  e.point.attained = r.converged && r.level < crit - delta;
  e.point.init = r.init;
  try {
    e.point.xi = concentration_scale(r.u);
  } catch (const Error&) {
    e.point.xi = std::numeric_limits<double>::quiet_NaN();
  }
  e.field = r.u;
  return e;
}

std::string scan_table(const std::vector<ScanPoint>& pts) {
  std::ostringstream os;
  os << std::setprecision(8);
  for (const auto& p : pts)
    os << "\n  c=" << p.coupling << " level=" << p.level << " converged=" << p.converged << " attained=" << p.attained;
  return os.str();
}

std::string solver_desc(const SolverOptions& o) {
  std::ostringstream os;
  os << "descent<=" << o.max_descent << " newton<=" << o.max_newton << " residual_tol=" << o.residual_tol
     << " defect_tol=" << o.defect_tol;
  return os.str();
}

} // namespace

const ScanPoint* ThresholdResult::at(double c) const {
  for (const auto& p : points)
    if (p.coupling == c) return &p;
  return nullptr;
}

ThresholdResult scan_threshold(const ProblemParams& family, const GridPtr& grid, double c_lo, double c_hi,
                               double crit_level, const ThresholdOptions& opt) {
  family.validate();
  if (!(c_lo > 0.0 && c_hi > c_lo)) fail(ErrorKind::InvalidParameter, "threshold range needs 0 < c_lo < c_hi");
  const double delta = opt.delta_rel * crit_level;
  if (!(delta > opt.solver.level_tol * crit_level))
    fail(ErrorKind::InvalidParameter, "predicate margin must exceed the solver level tolerance");

  ThresholdResult res;
  res.mode = family.mode;
  res.crit_level = crit_level;
  res.delta = delta;
  res.grid = grid->describe();
  res.solver = solver_desc(opt.solver);

  std::vector<RadialField> fields; // parallel to res.points
  auto hi = evaluate(family, grid, c_hi, std::nullopt, crit_level, delta, opt.solver);
  res.points.push_back(hi.point);
  fields.push_back(hi.field);
  auto lo = evaluate(family, grid, c_lo, hi.point.attained ? std::optional(hi.field) : std::nullopt, crit_level,
                     delta, opt.solver);
  res.points.push_back(lo.point);
  fields.push_back(lo.field);

  if (!hi.point.attained)
    fail(ErrorKind::BracketFailure, "predicate false at the upper end of the range" + scan_table(res.points));
  if (lo.point.attained) {
    res.degenerate = true;
    res.c_lo = res.c_hi = c_lo;
    res.history.emplace_back(c_lo, c_lo);
    return res;
  }

  double a = c_lo, b = c_hi;
  RadialField warm = hi.field;
  res.history.emplace_back(a, b);
  for (int k = 0; k < opt.max_bisect && b - a >= opt.tol_rel * b; ++k) {
    const double m = std::sqrt(a * b);
    auto e = evaluate(family, grid, m, warm, crit_level, delta, opt.solver);
    res.points.push_back(e.point);
    fields.push_back(e.field);
    if (e.point.attained) {
      b = m;
      warm = e.field;
    } else {
      a = m;
    }
    res.history.emplace_back(a, b);
  }
  res.c_lo = a;
  res.c_hi = b;

  if (opt.diagnose) {
    const auto fine = make_grid(grid->dim(), grid->r_max(), grid->intervals(), opt.diagnostic_grading);
    res.refined_grid = fine->describe();
    SolverOptions so = opt.solver;
    so.max_descent = opt.diagnostic_descent;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < res.points.size(); ++i)
      if (res.points[i].coupling <= a) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return res.points[x].coupling < res.points[y].coupling; });
    for (auto i : idx) {
      const ScanPoint& p = res.points[i];
      PinDiagnostic d;
      d.coupling = p.coupling;
      d.converged_base = p.converged;
      d.level_base = d.level_refined = p.level;
      d.xi_base = d.xi_refined = p.xi;
      if (!p.converged) {
        // Continue the minimizing sequence on a grid that resolves a smaller core.
        const auto r = ground_state_single(with_coupling(family, p.coupling), fine,
                                           InitSpec::supplied(transfer(fields[i], fine)), so);
        d.level_refined = r.level;
        try {
          d.xi_refined = concentration_scale(r.u);
        } catch (const Error&) {
          d.xi_refined = std::numeric_limits<double>::quiet_NaN();
        }
        d.concentrating = d.xi_refined < d.xi_base;
      }
      d.pinned = std::abs(d.level_refined - crit_level) <= delta;
      res.below.push_back(d);
    }
  }
  return res;
}

bool ThresholdResult::pinned_below() const {
  if (below.empty()) return false;
  bool any_conc = false;
  for (const auto& d : below) {
    if (!d.pinned) return false;
    any_conc = any_conc || d.concentrating;
  }
  return any_conc;
}

BracketCheck check_bracket(const ProblemParams& family, const GridPtr& grid, const ThresholdResult& r,
                           const ThresholdOptions& opt) {
  BracketCheck c;
  auto hi = evaluate(family, grid, r.c_hi, std::nullopt, r.crit_level, r.delta, opt.solver);
  auto lo = evaluate(family, grid, r.c_lo, hi.point.attained ? std::optional(hi.field) : std::nullopt, r.crit_level,
                     r.delta, opt.solver);
  c.hi = hi.point;
  c.lo = lo.point;
  c.overlaps = hi.point.attained && !lo.point.attained;
  return c;
}

// ------------------------------------------------------------- monotonicity

MonotonicityReport monotonicity_scan(const ProblemParams& family, const GridPtr& grid, std::vector<double> couplings,
                                     double tol_rel, const SolverOptions& opt) {
  if (couplings.size() < 8) fail(ErrorKind::InvalidParameter, "monotonicity scan needs at least 8 couplings");
  std::sort(couplings.begin(), couplings.end());
  MonotonicityReport rep;
  std::optional<RadialField> warm;
  for (double c : couplings) {
    const auto r = ground_state(with_coupling(family, c), grid, warm_schedule(warm, grid), opt);
    rep.coupling.push_back(c);
    rep.level.push_back(r.level);
    rep.converged.push_back(r.converged);
    warm = r.u;
  }
  double scale = 0.0;
  for (double m : rep.level) scale = std::max(scale, std::abs(m));
  rep.tol = tol_rel * scale;
  for (std::size_t i = 0; i + 1 < rep.level.size(); ++i)
    if (rep.level[i + 1] > rep.level[i] + rep.tol) rep.violations.push_back(i);
  return rep;
}

// --------------------------------------------------------------- gap rates

double gap_reference(const ProblemParams& family, const GridPtr& grid) {
  if (family.mode == Mode::Lambda) {
    const auto Q = shoot_local_ground_state(family.N, family.q).field;
    const double q = family.q;
    return (q - 2.0) / (2.0 * q) * std::pow(local_quotient(Q, q), q / (q - 2.0));
  }
  if (family.mode == Mode::Mu) {
    const auto prm = ProblemParams::general(family.N, family.alpha, family.p, family.q, 1.0, 0.0);
    const auto r = ground_state(prm, grid);
    if (!r.converged) fail(ErrorKind::ConstraintViolation, "Choquard-only ground state did not converge");
    return r.level;
  }
  fail(ErrorKind::InvalidParameter, "gap series need the lambda or mu family");
}

double gap_exponent(const ProblemParams& f) {
  if (f.mode == Mode::Lambda) return -2.0 * (f.p - 1.0) / (f.q - 2.0);
  if (f.mode == Mode::Mu) return -(f.q - 2.0) / (2.0 * (f.p - 1.0));
  fail(ErrorKind::InvalidParameter, "gap series need the lambda or mu family");
}

GapSeries gap_series(const ProblemParams& family, const GridPtr& grid, const std::vector<double>& couplings,
                     double reference, const SolverOptions& opt) {
  GapSeries s;
  s.mode = family.mode;
  s.reference = reference;
  s.expected = gap_exponent(family);
  const double e = family.mode == Mode::Lambda ? 2.0 / (family.q - 2.0) : 1.0 / (family.p - 1.0);
  std::optional<RadialField> warm;
  std::vector<double> x, y;
  for (double c : couplings) {
    const auto r = ground_state(with_coupling(family, c), grid, warm_schedule(warm, grid), opt);
    GapRow row;
    row.coupling = c;
    row.level = r.level;
    row.scaled_level = std::pow(c, e) * r.level;
    row.gap = reference - row.scaled_level;
    row.pde_residual = r.pde_residual;
    row.converged = r.converged;
    s.rows.push_back(row);
    if (!(row.gap > 0.0)) {
      std::ostringstream os;
      os << "non-positive gap " << row.gap << " at coupling " << c;
      fail(ErrorKind::ConstraintViolation, os.str());
    }
    x.push_back(c);
    y.push_back(row.gap);
    warm = r.u;
  }
  s.fit = rate_fit(x, y, s.expected);
  return s;
}

// ------------------------------------------------------------ multiplicity

std::optional<double> effective_coupling_exponent(const ProblemParams& prm) {
  if (prm.mode != Mode::Normalized) return std::nullopt;
  if (prm.critical == CriticalTerm::Hls) {
    if (prm.N == 3 && prm.q > 3.0 && prm.q < 4.0) return -2.0 * (4.0 - prm.q) / (prm.q - 2.0);
    return std::nullopt;
  }
  if (prm.N >= 4 && prm.p < 1.0 + prm.alpha / (prm.N - 2.0))
    return -(prm.alpha - (prm.p - 1.0) * (prm.N - 2.0)) / 2.0;
  return std::nullopt;
}

MultiplicityTable multiplicity_experiment(const ProblemParams& prm, const GridPtr& grid, const std::vector<double>& nus,
                                          const MultiplicityOptions& opt) {
  if (prm.mode != Mode::Normalized) fail(ErrorKind::InvalidParameter, "multiplicity needs the normalized mode");
  prm.validate();
  MultiplicityTable t;
  t.params = prm;
  t.expected_exponent = effective_coupling_exponent(prm);
  const GridPtr gp = opt.grid_plus ? opt.grid_plus : grid;
  const GridPtr gm = opt.grid_minus ? opt.grid_minus : grid;
  std::vector<double> fx, fy;

  for (double nu : nus) {
    ProblemParams p = prm;
    p.nu = nu;
    NormalizedBranches br;
    try {
      br = normalized_branches(p, gp, gm, {}, opt.normalized);
    } catch (const Error& e) {
      MultiplicityRow row;
      row.nu = nu;
      row.reason = std::string("branches: ") + e.what();
      t.rows.push_back(row);
      continue;
    }
    if (!br.plus) {
      MultiplicityRow row;
      row.nu = nu;
      row.branch = Branch::Plus;
      row.gated = true;
      row.reason = br.plus_reason;
      t.rows.push_back(row);
    }
    for (const auto* b : {br.plus ? &*br.plus : nullptr, br.minus ? &*br.minus : nullptr}) {
      if (!b) continue;
      MultiplicityRow row;
      row.nu = nu;
      row.branch = b->branch;
      row.lambda_nu = b->lambda_nu;
      row.multiplier_defect = b->multiplier_identity_defect;
      if (!b->converged) {
        row.reason = "normalized branch: " + b->note;
        t.rows.push_back(row);
        continue;
      }
      try {
        const auto s = second_solution_via_rescale(*b, opt.residual_tol);
        row.coupling = s.coupling;
        row.energy_branch = s.energy;
        row.residual_branch = s.pde_residual;
        const GridPtr g = b->branch == Branch::Plus ? gp : gm;
        const auto gs = ground_state(s.params, g, warm_schedule(std::nullopt, g), opt.solver);
        row.energy_ground = gs.level - 0.5 * mass(gs.u);
        row.residual_ground = gs.pde_residual;
        if (!gs.converged) {
          row.reason = "ground state: " + gs.note;
          t.rows.push_back(row);
          continue;
        }
        const auto cand = transfer(s.field, gs.u.grid_ptr());
        double d = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) d = std::max(d, std::abs(cand[i] - gs.u[i]));
        row.sup_diff_rel = d / gs.u.max_abs();
        row.complete = true;
        const double tol = opt.level_tol * std::max(std::abs(row.energy_branch), std::abs(row.energy_ground));
        row.two_solutions = row.residual_branch < opt.residual_tol && row.residual_ground < opt.residual_tol &&
                            std::abs(row.energy_branch - row.energy_ground) > 3.0 * tol &&
                            row.sup_diff_rel > opt.sup_rel;
        if (b->branch == Branch::Minus) {
          fx.push_back(nu);
          fy.push_back(s.coupling);
        }
      } catch (const Error& e) {
        row.reason = std::string("rescale: ") + e.what();
      }
      t.rows.push_back(row);
    }
  }
  if (t.expected_exponent) {
    try {
      t.coupling_fit = rate_fit(fx, fy, t.expected_exponent);
    } catch (const Error&) {
      // too few converged rows for a fit
    }
  }
  return t;
}

// ------------------------------------------------------------- persistence

namespace {

const char* kind_dir(ArtifactKind k) {
  switch (k) {
  case ArtifactKind::Solve: return "solves";
  case ArtifactKind::Fit: return "fits";
  case ArtifactKind::Table: return "tables";
  }
  return "?";
}

bool allowed_extension(ArtifactKind k, const std::string& ext) {
  switch (k) {
  case ArtifactKind::Solve: return ext == ".json" || ext == ".csv";
  case ArtifactKind::Fit: return ext == ".json";
  case ArtifactKind::Table: return ext == ".csv";
  }
  return false;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Io, "cannot write " + path.string());
  os << content;
  if (!os) fail(ErrorKind::Io, "write failed for " + path.string());
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

std::string code_version() { return CHOQUARD_VERSION; }

std::string compute_run_id(const RunManifest& m) {
  std::ostringstream key;
  key << m.command << '\n';
  for (const auto& [k, v] : m.config) key << k << '=' << v << '\n';
  for (auto s : m.seeds) key << s << ',';
  std::ostringstream id;
  id << m.command << '-' << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key.str());
  return id.str();
}

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["config"] = config;
  j["code_version"] = code_version;
  j["seeds"] = seeds;
  j["wall_clock_s"] = wall_clock_s;
  j["artifacts"] = artifacts;
  j["run_id"] = run_id;
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.code_version = j.at("code_version").get<std::string>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.wall_clock_s = j.at("wall_clock_s").get<double>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.run_id = j.at("run_id").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidConfiguration, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::filesystem::path persist_run(const std::filesystem::path& root, RunManifest& manifest,
                                  const std::string& constants_json, const std::vector<Artifact>& artifacts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorKind::Io, "output root does not exist: " + root.string());
  manifest.run_id = compute_run_id(manifest);
  if (manifest.code_version.empty()) manifest.code_version = code_version();
  const fs::path dir = root / manifest.run_id;
  for (const char* sub : {"", "solves", "fits", "tables"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  manifest.artifacts.clear();
  manifest.artifacts.push_back("constants.json");
  write_file(dir / "constants.json", constants_json);
  for (const auto& a : artifacts) {
    const fs::path name(a.name);
    if (a.name.empty() || name.has_parent_path() || !allowed_extension(a.kind, name.extension().string()))
      fail(ErrorKind::Io, std::string("artifact name not allowed in ") + kind_dir(a.kind) + ": '" + a.name + "'");
    const std::string rel = std::string(kind_dir(a.kind)) + "/" + a.name;
    if (std::find(manifest.artifacts.begin(), manifest.artifacts.end(), rel) != manifest.artifacts.end())
      fail(ErrorKind::Io, "duplicate artifact " + rel);
    write_file(dir / rel, a.content);
    manifest.artifacts.push_back(rel);
  }
  write_file(dir / "manifest.json", manifest.to_json());
  return dir;
}

// ------------------------------------------------------------ serialization

namespace {

json j_params(const ProblemParams& p) {
  json j{{"N", p.N}, {"alpha", p.alpha}, {"p", p.p}, {"q", p.q}, {"mode", to_string(p.mode)}};
  switch (p.mode) {
  case Mode::Lambda: j["lambda"] = p.lambda; break;
  case Mode::Mu: j["mu"] = p.mu; break;
  case Mode::General: j["lambda"] = p.lambda, j["mu"] = p.mu; break;
  case Mode::Normalized:
    j["nu"] = p.nu, j["a"] = p.a, j["critical"] = p.critical == CriticalTerm::Hls ? "hls" : "sobolev";
    break;
  }
  return j;
}

json j_fit(const LinearFit& f) {
  return {{"slope", f.slope},         {"intercept", f.intercept}, {"r2", f.r2},
          {"slope_stderr", f.slope_stderr}, {"slope_ci95", f.slope_ci95}, {"first", f.first}, {"last", f.last}};
}

json j_rate(const RateFit& f) {
  json j{{"x", f.x}, {"y", f.y}, {"scale", f.scale == FitScale::LogLog ? "loglog" : "linlog"}, {"fit", j_fit(f.fit)}};
  if (f.full) j["full"] = j_fit(*f.full);
  if (f.expected) j["expected"] = *f.expected, j["rel_error"] = f.rel_error;
  return j;
}

json j_point(const ScanPoint& p) {
  return {{"coupling", p.coupling}, {"level", p.level},         {"pde_residual", p.pde_residual},
          {"xi", std::isfinite(p.xi) ? json(p.xi) : json(nullptr)},
          {"converged", p.converged}, {"attained", p.attained}, {"init", p.init}};
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

} // namespace

std::string to_json(const ProblemParams& prm) { return j_params(prm).dump(2); }

std::string to_json(const GroundStateResult& r) {
  json j{{"params", j_params(r.params)},
         {"level", r.level},
         {"nehari_defect", r.defects.nehari_rel},
         {"pohozaev_defect", r.defects.pohozaev_rel},
         {"pde_residual", r.pde_residual},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"positive", r.positive},
         {"monotone", r.monotone},
         {"init", r.init},
         {"note", r.note},
         {"grid", json::parse(grid_header_json(r.u.grid()))}};
  return j.dump(2);
}

std::string to_json(const NormalizedBranchResult& r) {
  json j{{"params", j_params(r.params)},
         {"branch", to_string(r.branch)},
         {"level", r.level},
         {"lambda_nu", r.lambda_nu},
         {"multiplier_identity_defect", r.multiplier_identity_defect},
         {"pde_residual", r.pde_residual},
         {"fiber_second", r.fiber_second},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"note", r.note},
         {"grid", json::parse(grid_header_json(r.u.grid()))}};
  return j.dump(2);
}

std::string to_json(const RateFit& f) { return j_rate(f).dump(2); }

std::string to_json(const ThresholdResult& r) {
  json pts = json::array(), hist = json::array();
  for (const auto& p : r.points) pts.push_back(j_point(p));
  for (const auto& [a, b] : r.history) hist.push_back({a, b});
  json j{{"mode", to_string(r.mode)}, {"c_lo", r.c_lo}, {"c_hi", r.c_hi},     {"degenerate", r.degenerate},
         {"crit_level", r.crit_level}, {"delta", r.delta}, {"points", pts},    {"history", hist},
         {"grid", r.grid},            {"solver", r.solver}};
  json below = json::array();
  for (const auto& d : r.below)
    below.push_back({{"coupling", d.coupling},
                     {"converged_base", d.converged_base},
                     {"level_base", d.level_base},
                     {"level_refined", d.level_refined},
                     {"xi_base", d.xi_base},
                     {"xi_refined", d.xi_refined},
                     {"pinned", d.pinned},
                     {"concentrating", d.concentrating}});
  j["below"] = below;
  j["refined_grid"] = r.refined_grid;
  j["pinned_below"] = r.pinned_below();
  return j.dump(2);
}

std::string to_json(const MonotonicityReport& r) {
  json j{{"coupling", r.coupling}, {"level", r.level},           {"converged", r.converged},
         {"tol", r.tol},           {"violations", r.violations}, {"ok", r.ok()}};
  return j.dump(2);
}

std::string to_json(const GapSeries& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"coupling", r.coupling}, {"level", r.level}, {"scaled_level", r.scaled_level}, {"gap", r.gap},
                    {"pde_residual", r.pde_residual}, {"converged", r.converged}});
  json j{{"mode", to_string(s.mode)}, {"reference", s.reference}, {"expected", s.expected}, {"rows", rows},
         {"fit", j_rate(s.fit)}};
  return j.dump(2);
}

std::string to_json(const MultiplicityTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"nu", r.nu},
                    {"branch", to_string(r.branch)},
                    {"gated", r.gated},
                    {"complete", r.complete},
                    {"reason", r.reason},
                    {"lambda_nu", r.lambda_nu},
                    {"multiplier_defect", r.multiplier_defect},
                    {"coupling", r.coupling},
                    {"energy_branch", r.energy_branch},
                    {"energy_ground", r.energy_ground},
                    {"residual_branch", r.residual_branch},
                    {"residual_ground", r.residual_ground},
                    {"sup_diff_rel", r.sup_diff_rel},
                    {"two_solutions", r.two_solutions}});
  json j{{"params", j_params(t.params)}, {"rows", rows}};
  if (t.expected_exponent) j["expected_exponent"] = *t.expected_exponent;
  if (t.coupling_fit) j["coupling_fit"] = j_rate(*t.coupling_fit);
  return j.dump(2);
}

std::string field_csv(const RadialField& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

std::string to_csv(const ThresholdResult& r) {
  std::ostringstream os;
  os << "coupling,level,pde_residual,xi,converged,attained,init\n";
  for (const auto& p : r.points)
    os << num(p.coupling) << ',' << num(p.level) << ',' << num(p.pde_residual) << ',' << num(p.xi) << ','
       << p.converged << ',' << p.attained << ',' << p.init << '\n';
  return os.str();
}

std::string to_csv(const MonotonicityReport& r) {
  std::ostringstream os;
  os << "coupling,level,converged\n";
  for (std::size_t i = 0; i < r.coupling.size(); ++i)
    os << num(r.coupling[i]) << ',' << num(r.level[i]) << ',' << r.converged[i] << '\n';
  return os.str();
}

std::string to_csv(const GapSeries& s) {
  std::ostringstream os;
  os << "coupling,level,scaled_level,gap,pde_residual,converged\n";
  for (const auto& r : s.rows)
    os << num(r.coupling) << ',' << num(r.level) << ',' << num(r.scaled_level) << ',' << num(r.gap) << ','
       << num(r.pde_residual) << ',' << r.converged << '\n';
  return os.str();
}

std::string to_csv(const MultiplicityTable& t) {
  std::ostringstream os;
  os << "nu,branch,gated,complete,lambda_nu,multiplier_defect,coupling,energy_branch,energy_ground,"
        "residual_branch,residual_ground,sup_diff_rel,two_solutions,reason\n";
  for (const auto& r : t.rows)
    os << num(r.nu) << ',' << to_string(r.branch) << ',' << r.gated << ',' << r.complete << ',' << num(r.lambda_nu)
       << ',' << num(r.multiplier_defect) << ',' << num(r.coupling) << ',' << num(r.energy_branch) << ','
       << num(r.energy_ground) << ',' << num(r.residual_branch) << ',' << num(r.residual_ground) << ','
       << num(r.sup_diff_rel) << ',' << r.two_solutions << ",\"" << r.reason << "\"\n";
  return os.str();
}

std::string to_csv(const FiberProfile& f) {
  std::ostringstream os;
  os << "t,energy,K,M,R,P\n";
  for (std::size_t i = 0; i < f.t.size(); ++i)
    os << num(f.t[i]) << ',' << num(f.energy[i]) << ',' << num(f.parts[i].K) << ',' << num(f.parts[i].M) << ','
       << num(f.parts[i].R) << ',' << num(f.parts[i].P) << '\n';
  return os.str();
}

} // namespace choquard
