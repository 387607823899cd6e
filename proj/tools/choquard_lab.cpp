// choquard-lab: experiment driver. Every subcommand reads one INI config,
// accepts --set section.key=value overrides and persists a run directory
// under --out.
#include "choquard/asymptotics.hpp"
#include "choquard/config.hpp"
#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/lab.hpp"
#include "choquard/shooting.hpp"
#include "choquard/solver.hpp"
#include "choquard/testfn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace choquard;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInvariant = 2;

struct Context {
  std::string command;
  Config cfg;
  fs::path out = ".";
  std::vector<Artifact> artifacts;
  json constants = json::object();
  bool invariant_failed = false;
  std::vector<std::string> failures;

  void fail_invariant(const std::string& what) {
    invariant_failed = true;
    failures.push_back(what);
  }
  void add(ArtifactKind k, const std::string& name, std::string content) {
    artifacts.push_back({k, name, std::move(content)});
  }
};

json basic_constants(const ProblemParams& prm) {
  const int N = prm.N;
  json j{{"N", N},
         {"alpha", prm.alpha},
         {"p", prm.p},
         {"q", prm.q},
         {"two_star", two_star(N)},
         {"two_alpha_star", two_alpha_star(N, prm.alpha)},
         {"S_analytic", sobolev_constant_analytic(N)},
         {"hls_constant", hls_constant(N, prm.alpha)},
         {"riesz_normalization", riesz_normalization(N, prm.alpha)},
         {"crit_level_sob", crit_level_sob(N, sobolev_constant_analytic(N))}};
  return j;
}

// ------------------------------------------------------------- subcommands

void cmd_constants(Context& ctx) {
  const auto prm = problem_from_config(ctx.cfg);
  const int N = prm.N;
  const auto tg = make_grid(N, ctx.cfg.get_double("constants.r_max", 2000.0), ctx.cfg.get_int("constants.n", 2000),
                            ctx.cfg.get_double("constants.grading", 3.0));
  const auto W = talenti_field(tg);
  RayleighInputs in;
  in.talenti = &W;
  in.alpha = prm.alpha;
  in.p = prm.p;
  in.q = prm.q;
  std::optional<RadialField> Q;
  if (prm.q < two_star(N)) {
    Q = shoot_local_ground_state(N, prm.q).field;
    in.local_ground = &*Q;
  }
  const auto rc = rayleigh_constants(in);
  SharpInputs sh;
  sh.S = sobolev_constant_analytic(N);
  sh.S_alpha = rc.S_alpha;
  if (Q) sh.C_Nq_pow_q = gn_constant_pow(N, prm.q, std::sqrt(mass(*Q)));
  const double pt = 2.0 * N * prm.p / (N + prm.alpha);
  if (pt > 2.0 && pt < two_star(N)) {
    const auto Qp = shoot_local_ground_state(N, pt).field;
    sh.C_Np_pow_2p = std::pow(gn_constant_pow(N, pt, std::sqrt(mass(Qp))), 2.0 * prm.p / pt);
  }
  const auto t = coefficient_table(N, prm.alpha, prm.p, prm.q, sh);
  json j = basic_constants(prm);
  j["S_rayleigh"] = rc.S;
  j["S_alpha_rayleigh"] = rc.S_alpha;
  if (rc.S_q) j["S_q"] = *rc.S_q;
  if (sh.C_Nq_pow_q) j["C_Nq_pow_q"] = *sh.C_Nq_pow_q;
  if (sh.C_Np_pow_2p) j["C_Np_pow_2p"] = *sh.C_Np_pow_2p;
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  j["gamma_q"] = opt(t.gamma_q);
  j["eta_p"] = opt(t.eta_p);
  j["K_q"] = opt(t.K_q);
  j["K_p"] = opt(t.K_p);
  j["crit_level_hls"] = t.crit_level_hls;
  j["crit_level_sob"] = t.crit_level_sob;
  j["hls_smallness_bound"] = opt(hls_smallness_bound(t, sh));
  j["sob_smallness_bound"] = opt(sob_smallness_bound(t, sh));
  j["talenti_grid"] = tg->describe();
  const double dev = std::abs(rc.S / sh.S - 1.0);
  j["S_relative_deviation"] = dev;
  ctx.constants = j;
  std::cout << std::setprecision(10) << "S (Gamma) " << sh.S << "  S (grid) " << rc.S << "  S_alpha " << rc.S_alpha
            << "\ncrit_level_hls " << t.crit_level_hls << "  crit_level_sob " << t.crit_level_sob << "\n";
  if (dev > 5e-3) ctx.fail_invariant("grid Sobolev quotient deviates from the Gamma value by more than 0.5%");
}

void cmd_solve(Context& ctx) {
  const auto prm = problem_from_config(ctx.cfg);
  const auto grid = grid_from_config(ctx.cfg, prm.N);
  ctx.constants = basic_constants(prm);
  SolverOptions so;
  so.residual_tol = ctx.cfg.get_double("solve.residual_tol", so.residual_tol);
  so.max_descent = ctx.cfg.get_int("solve.max_descent", so.max_descent);
  const auto r = ground_state(prm, grid, default_schedule(), so);
  ctx.add(ArtifactKind::Solve, "ground_state.json", to_json(r));
  ctx.add(ArtifactKind::Solve, "ground_state.csv", field_csv(r.u));
  std::cout << std::setprecision(10) << "level " << r.level << "  residual " << r.pde_residual << "  converged "
            << r.converged << "  init " << r.init << "\n";
  if (!r.converged) ctx.fail_invariant("ground state did not converge: " + r.note);
}

void cmd_fiber(Context& ctx) {
  const auto prm = problem_from_config(ctx.cfg);
  const auto grid = grid_from_config(ctx.cfg, prm.N);
  ctx.constants = basic_constants(prm);
  const std::string src = ctx.cfg.get_string("fiber.field", "gaussian");
  const double width = ctx.cfg.get_double("fiber.width", 1.0);
  RadialField u = src == "bubble" ? InitSpec::bubble(width).build(grid) : InitSpec::gaussian(width).build(grid);
  if (prm.mode == Mode::Normalized) u = u.scaled(prm.a / std::sqrt(mass(u)));
  const auto t = ctx.cfg.get_list("fiber.t", parse_list("geom:0.05:20:200"));
  const std::string kind = ctx.cfg.get_string("fiber.kind", prm.mode == Mode::Normalized ? "mass" : "nehari");
  const auto prof = fiber_profile(prm, u, fiber_kind_from_string(kind), t);
  ctx.add(ArtifactKind::Table, "fiber.csv", to_csv(prof));
  json j{{"kind", kind}, {"critical_t", json::array()}, {"curvature", prof.curvature},
         {"plateau_width", prof.plateau_width}};
  for (auto i : prof.critical) j["critical_t"].push_back(prof.t[i]);
  if (prm.mode == Mode::Normalized) {
    const auto cls = mass_fiber_classify(prm, u);
    if (cls.plus) j["plus"] = {{"t", cls.plus->t}, {"energy", cls.plus->energy}};
    if (cls.minus) j["minus"] = {{"t", cls.minus->t}, {"energy", cls.minus->energy}};
  } else {
    const auto pr = nehari_project(prm, u);
    j["nehari_t"] = pr.t_star;
    const auto d = stationarity_defects(prm, pr.field);
    j["nehari_defect_at_projection"] = d.nehari_rel;
    if (std::abs(d.nehari_rel) > 1e-8) ctx.fail_invariant("fiber is not stationary at the Nehari projection");
  }
  ctx.add(ArtifactKind::Solve, "fiber.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
}

void cmd_scan_threshold(Context& ctx) {
  const auto fam = problem_from_config(ctx.cfg);
  const auto grid = grid_from_config(ctx.cfg, fam.N);
  ctx.constants = basic_constants(fam);
  const double crit = ctx.cfg.get_double("scan.crit_level", threshold_level(fam));
  ctx.constants["threshold_level"] = crit;
  ThresholdOptions opt;
  opt.delta_rel = ctx.cfg.get_double("scan.delta", opt.delta_rel);
  opt.tol_rel = ctx.cfg.get_double("scan.tol", opt.tol_rel);
  opt.diagnose = ctx.cfg.get_bool("scan.diagnose", opt.diagnose);
  opt.diagnostic_grading = ctx.cfg.get_double("scan.diagnostic_grading", opt.diagnostic_grading);
  const auto r = scan_threshold(fam, grid, ctx.cfg.get_double("scan.lo", 1.0), ctx.cfg.get_double("scan.hi", 4.0),
                                crit, opt);
  ctx.add(ArtifactKind::Fit, "threshold.json", to_json(r));
  ctx.add(ArtifactKind::Table, "threshold.csv", to_csv(r));
  std::cout << std::setprecision(8) << "bracket [" << r.c_lo << ", " << r.c_hi << "]"
            << (r.degenerate ? " (degenerate)" : "") << "  crit_level " << crit << "\n";
  for (const auto& d : r.below)
    std::cout << "  below c=" << d.coupling << " level " << d.level_refined << " xi " << d.xi_base << " -> "
              << d.xi_refined << (d.pinned ? " pinned" : "") << (d.concentrating ? " concentrating" : "") << "\n";
  if (opt.diagnose && !r.degenerate && !r.pinned_below())
    ctx.fail_invariant("levels below the bracket do not pin at the critical level");
  if (ctx.cfg.has("scan.monotonicity")) {
    const auto m = monotonicity_scan(fam, grid, ctx.cfg.get_list("scan.monotonicity", {}),
                                     ctx.cfg.get_double("scan.monotonicity_tol", 1e-6));
    ctx.add(ArtifactKind::Fit, "monotonicity.json", to_json(m));
    ctx.add(ArtifactKind::Table, "monotonicity.csv", to_csv(m));
    std::cout << "monotonicity violations " << m.violations.size() << "\n";
    if (!m.ok()) ctx.fail_invariant("level curve is not nonincreasing");
  }
}

// Reads (coupling, level) pairs from solves/*.json of an earlier run.
std::vector<std::pair<double, double>> read_levels(const fs::path& run) {
  std::vector<std::pair<double, double>> out;
  const fs::path dir = run / "solves";
  if (!fs::is_directory(dir)) fail(ErrorKind::Io, "no solves directory in " + run.string());
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    std::ifstream in(e.path());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("params") || !j.contains("level")) continue;
    const auto& p = j["params"];
    const std::string mode = p.value("mode", "");
    if (mode == "lambda") out.emplace_back(p["lambda"].get<double>(), j["level"].get<double>());
    if (mode == "mu") out.emplace_back(p["mu"].get<double>(), j["level"].get<double>());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void cmd_asymptotics(Context& ctx) {
  const auto fam = problem_from_config(ctx.cfg);
  const auto grid = grid_from_config(ctx.cfg, fam.N);
  ctx.constants = basic_constants(fam);
  const double ref = ctx.cfg.get_double("asymptotics.reference", gap_reference(fam, grid));
  ctx.constants["gap_reference"] = ref;
  if (ctx.cfg.has("asymptotics.source")) {
    // Fit only: levels come from an earlier run directory.
    const auto lv = read_levels(ctx.cfg.get_string("asymptotics.source", ""));
    const double e = fam.mode == Mode::Lambda ? 2.0 / (fam.q - 2.0) : 1.0 / (fam.p - 1.0);
    std::vector<double> x, y;
    std::ostringstream csv;
    csv << "coupling,level,gap\n" << std::setprecision(17);
    for (auto [c, m] : lv) {
      x.push_back(c);
      y.push_back(ref - std::pow(c, e) * m);
      csv << c << ',' << m << ',' << y.back() << '\n';
    }
    const auto f = rate_fit(x, y, gap_exponent(fam));
    ctx.add(ArtifactKind::Fit, "gap.json", to_json(f));
    ctx.add(ArtifactKind::Table, "gap.csv", csv.str());
    std::cout << "slope " << f.fit.slope << " expected " << *f.expected << "\n";
    return;
  }
  const auto cs = ctx.cfg.get_list("asymptotics.couplings", parse_list("geom:10:1000:6"));
  const auto s = gap_series(fam, grid, cs, ref);
  ctx.add(ArtifactKind::Fit, "gap.json", to_json(s));
  ctx.add(ArtifactKind::Table, "gap.csv", to_csv(s));
  std::cout << std::setprecision(6) << "gap slope " << s.fit.fit.slope << " expected " << s.expected << " (rel error "
            << s.fit.rel_error << ")\n";
  for (const auto& r : s.rows)
    if (!r.converged) ctx.fail_invariant("unconverged solve in the gap series");
}

void cmd_normalized(Context& ctx) {
  const auto prm = problem_from_config(ctx.cfg);
  if (prm.mode != Mode::Normalized) fail(ErrorKind::InvalidConfiguration, "normalized needs problem.mode = normalized");
  const auto grid = grid_from_config(ctx.cfg, prm.N);
  const auto gp = ctx.cfg.has("grid_plus.n") ? grid_from_config(ctx.cfg, prm.N, "grid_plus") : grid;
  const auto gm = ctx.cfg.has("grid_minus.n") ? grid_from_config(ctx.cfg, prm.N, "grid_minus") : grid;
  ctx.constants = basic_constants(prm);
  NormalizedOptions opt;
  if (ctx.cfg.has("normalized.smallness_bound"))
    opt.smallness_bound = ctx.cfg.get_double("normalized.smallness_bound", 0.0);
  const auto br = normalized_branches(prm, gp, gm, {}, opt);
  const double tol = ctx.cfg.get_double("normalized.multiplier_tol", 1e-3);
  for (const auto* b : {br.plus ? &*br.plus : nullptr, br.minus ? &*br.minus : nullptr}) {
    if (!b) continue;
    const std::string name = b->branch == Branch::Plus ? "plus" : "minus";
    ctx.add(ArtifactKind::Solve, name + ".json", to_json(*b));
    ctx.add(ArtifactKind::Solve, name + ".csv", field_csv(b->u));
    std::cout << std::setprecision(8) << name << ": level " << b->level << " lambda " << b->lambda_nu
              << " multiplier defect " << b->multiplier_identity_defect << " converged " << b->converged << "\n";
    if (b->converged && !(b->multiplier_identity_defect < tol))
      ctx.fail_invariant(name + " branch violates the multiplier identity");
  }
  if (!br.plus) std::cout << "plus: absent (" << br.plus_reason << ")\n";
}

void cmd_multiplicity(Context& ctx) {
  const auto prm = problem_from_config(ctx.cfg);
  const auto grid = grid_from_config(ctx.cfg, prm.N);
  ctx.constants = basic_constants(prm);
  MultiplicityOptions opt;
  if (ctx.cfg.has("grid_plus.n")) opt.grid_plus = grid_from_config(ctx.cfg, prm.N, "grid_plus");
  if (ctx.cfg.has("grid_minus.n")) opt.grid_minus = grid_from_config(ctx.cfg, prm.N, "grid_minus");
  if (ctx.cfg.has("multiplicity.smallness_bound"))
    opt.normalized.smallness_bound = ctx.cfg.get_double("multiplicity.smallness_bound", 0.0);
  const auto nus = ctx.cfg.get_list("multiplicity.nu", {0.5, 1.0});
  const auto t = multiplicity_experiment(prm, grid, nus, opt);
  ctx.add(ArtifactKind::Fit, "multiplicity.json", to_json(t));
  ctx.add(ArtifactKind::Table, "multiplicity.csv", to_csv(t));
  for (const auto& r : t.rows) {
    std::cout << std::setprecision(6) << "nu " << r.nu << " " << to_string(r.branch);
    if (!r.complete) {
      std::cout << (r.gated ? " gated: " : " incomplete: ") << r.reason << "\n";
      continue;
    }
    std::cout << " coupling " << r.coupling << " E(branch) " << r.energy_branch << " E(ground) " << r.energy_ground
              << " sup diff " << r.sup_diff_rel << (r.two_solutions ? "  two solutions" : "") << "\n";
    if (r.energy_ground > r.energy_branch + 1e-6 * std::abs(r.energy_branch))
      ctx.fail_invariant("ground state lies above the rescaled branch");
  }
}

void cmd_testfn(Context& ctx) {
  const int N = ctx.cfg.get_int("testfn.N", 3);
  const double a = ctx.cfg.get_double("testfn.a", 10.0);
  const double q = ctx.cfg.get_double("testfn.q", 4.0);
  const double p = ctx.cfg.get_double("testfn.p", 2.5);
  const double alpha = ctx.cfg.get_double("testfn.alpha", 1.0);
  const auto eps = ctx.cfg.get_list("testfn.eps", parse_list("geom:0.2:0.005:7"));
  ctx.constants = json{{"N", N}, {"S_analytic", sobolev_constant_analytic(N)}};
  const auto s = bubble_sweep(N, a, eps, q, p, alpha, ctx.cfg.get_int("testfn.n", 800));
  std::ostringstream csv;
  csv << "eps,R,kinetic,mass,power,riesz,critical_power,kinetic_dev,critical_dev\n" << std::setprecision(17);
  for (const auto& r : s.rows) {
    csv << r.eps << ',' << r.R << ',' << r.kinetic << ',' << r.mass << ',' << r.power << ',' << r.riesz << ','
        << r.critical_power << ',' << r.kinetic_dev << ',' << r.critical_dev << '\n';
    if (std::abs(r.mass - a * a) > 1e-8 * a * a) ctx.fail_invariant("bubble mass off the calibrated value");
  }
  ctx.add(ArtifactKind::Table, "bubble.csv", csv.str());
  ctx.add(ArtifactKind::Fit, "power.json", to_json(s.power_fit));
  ctx.add(ArtifactKind::Fit, "riesz.json", to_json(s.riesz_fit));
  std::cout << std::setprecision(6) << "power regime " << to_string(s.expected_power.regime) << " slope "
            << s.power_fit.fit.slope << "; riesz slope " << s.riesz_fit.fit.slope << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"choquard-lab: ground states and normalized solutions of Choquard equations with a local perturbation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out = ".";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output root (must exist)");
  app.add_option("--set", overrides, "override, section.key=value (repeatable)");

  using Handler = void (*)(Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> cmds = {
      {"constants", "sharp constants, coefficient table and critical levels", cmd_constants},
      {"solve", "ground state of the frequency-one problem", cmd_solve},
      {"fiber", "fiber map of a trial field", cmd_fiber},
      {"scan-threshold", "bisection for the coupling threshold", cmd_scan_threshold},
      {"asymptotics", "large-coupling gap series and rate fit", cmd_asymptotics},
      {"normalized", "mass-constrained branches", cmd_normalized},
      {"multiplicity", "second solution by rescaling vs ground state", cmd_multiplicity},
      {"testfn", "cut-off bubble sweep", cmd_testfn},
  };
  Handler chosen = nullptr;
  std::string chosen_name;
  for (const auto& [name, help, fn] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&, n = name, f = fn] {
      chosen = f;
      chosen_name = n;
    });
    sub->fallthrough();
  }
  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Context ctx;
    ctx.command = chosen_name;
    if (!config_path.empty()) ctx.cfg = Config::from_file(config_path);
    for (const auto& o : overrides) ctx.cfg.apply_override(o);
    ctx.out = out;
    if (!fs::is_directory(ctx.out)) fail(ErrorKind::Io, "output root does not exist: " + ctx.out.string());
    chosen(ctx);

    RunManifest m;
    m.command = chosen_name;
    m.config = ctx.cfg.entries();
    m.code_version = code_version();
    m.seeds = {static_cast<std::uint64_t>(ctx.cfg.get_int("run.seed", 0))};
    m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto dir = persist_run(ctx.out, m, ctx.constants.dump(2), ctx.artifacts);
    std::cout << "run directory " << dir.string() << "\n";
    if (ctx.invariant_failed) {
      for (const auto& f : ctx.failures) std::cerr << "invariant failed: " << f << "\n";
      return kInvariant;
    }
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
