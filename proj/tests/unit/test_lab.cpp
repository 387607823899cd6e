#include <doctest.h>

#include "choquard/config.hpp"
#include "choquard/error.hpp"
#include "choquard/lab.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace choquard;
namespace fs = std::filesystem;

namespace {

template <class F>
ErrorKind thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("choquard_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kIni = R"(
[problem]
N = 3
alpha = 1
p = 4
q = 3
mode = lambda
lambda = 2.5

[grid]
n = 300
r_max = 40
grading = 2

[scan]
monotonicity = geom:1:100:3
couplings = 1, 2,4
)";

} // namespace

TEST_CASE("config parsing and overrides") {
  auto c = Config::from_string(kIni);
  CHECK(c.get_int("problem.N", 0) == 3);
  CHECK(c.get_double("problem.lambda", 0) == 2.5);
  CHECK(c.get_string("problem.mode", "") == "lambda");
  CHECK(c.get_double("missing.key", 7.0) == 7.0);
  const auto g = c.get_list("scan.monotonicity", {});
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(c.get_list("scan.couplings", {}) == std::vector<double>{1, 2, 4});
  CHECK(parse_list("lin:0:1:5") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});

  c.apply_override("problem.lambda=3.5");
  CHECK(c.get_double("problem.lambda", 0) == 3.5);
  const auto prm = problem_from_config(c);
  CHECK(prm.mode == Mode::Lambda);
  CHECK(prm.lambda == 3.5);
  CHECK(grid_from_config(c, 3)->intervals() == 300);

  // Snapshot survives a round trip through INI text.
  const auto back = Config::from_string(c.to_ini());
  CHECK(back.entries() == c.entries());

  CHECK(thrown_kind([&] { c.apply_override("no-equals-sign"); }) == ErrorKind::InvalidConfiguration);
  CHECK(thrown_kind([&] { Config::from_string("[a]\nx = abc").get_double("a.x", 0); }) ==
        ErrorKind::InvalidConfiguration);
  CHECK(thrown_kind([] { Config::from_file("/nonexistent/choquard.ini"); }) == ErrorKind::Io);
  CHECK(thrown_kind([] { parse_list("geom:0:1:4"); }) == ErrorKind::InvalidConfiguration);

  auto n = Config::from_string("[problem]\nmode = normalized\nN = 4\nalpha = 1\np = 1.4\ncritical = sobolev\nnu = 0.5");
  const auto pn = problem_from_config(n);
  CHECK(pn.mode == Mode::Normalized);
  CHECK(pn.q == doctest::Approx(4.0));
  CHECK(pn.nu == 0.5);
}

TEST_CASE("family helpers") {
  const auto f = ProblemParams::lambda_problem(3, 1.0, 4.0, 3.0, 1.0);
  CHECK(with_coupling(f, 2.0).lambda == 2.0);
  CHECK(coupling_of(with_coupling(f, 2.0)) == 2.0);
  CHECK(with_coupling(ProblemParams::mu_problem(3, 2.0, 2.0, 4.0, 1.0), 5.0).mu == 5.0);
  CHECK(thrown_kind([] { with_coupling(ProblemParams::general(3, 1, 2, 4, 1, 1), 1.0); }) ==
        ErrorKind::InvalidParameter);
  CHECK(gap_exponent(ProblemParams::lambda_problem(3, 2.0, 2.0, 4.0, 1.0)) == -1.0);
  CHECK(gap_exponent(ProblemParams::mu_problem(3, 2.0, 2.0, 4.0, 1.0)) == -1.0);
  CHECK(gap_exponent(ProblemParams::mu_problem(3, 2.0, 3.0, 4.0, 1.0)) == -0.5);
  CHECK(threshold_level(f) == doctest::Approx(5.0383).epsilon(1e-4));
  CHECK(threshold_level(ProblemParams::mu_problem(4, 1.0, 1.5, 4.0, 1.0)) == doctest::Approx(26.3189).epsilon(1e-4));
  CHECK(thrown_kind([] { threshold_level(ProblemParams::lambda_problem(3, 1.0, 2.0, 3.0, 1.0)); }) ==
        ErrorKind::InvalidParameter);
  // Effective-coupling exponents of the two multiplicity regimes.
  CHECK(*effective_coupling_exponent(ProblemParams::normalized(3, 1.0, 3.5, 1.0, 1.0, CriticalTerm::Hls)) ==
        doctest::Approx(-2.0 / 3.0));
  CHECK(*effective_coupling_exponent(ProblemParams::normalized(4, 1.0, 1.4, 1.0, 1.0, CriticalTerm::Sobolev)) ==
        doctest::Approx(-0.1));
  CHECK(!effective_coupling_exponent(ProblemParams::normalized(3, 1.0, 3.0, 1.0, 1.0, CriticalTerm::Hls)));
}

TEST_CASE("threshold scan: degenerate bracket and bracket failure") {
  const auto f = ProblemParams::lambda_problem(3, 1.0, 4.0, 3.0, 1.0);
  const auto g = make_grid(3, 40.0, 400, 2.0);
  const double crit = threshold_level(f);
  ThresholdOptions opt;
  opt.diagnose = false;
  // Attained at both ends: the range lies above the threshold.
  const auto r = scan_threshold(f, g, 5.0, 10.0, crit, opt);
  CHECK(r.degenerate);
  CHECK(r.c_lo == 5.0);
  CHECK(r.c_hi == 5.0);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].level < crit - r.delta);
  CHECK(r.points[1].level < crit - r.delta);
  // Not attained at either end.
  CHECK(thrown_kind([&] { scan_threshold(f, g, 0.5, 1.0, crit, opt); }) == ErrorKind::BracketFailure);
  CHECK(thrown_kind([&] { scan_threshold(f, g, 1.0, 0.5, crit, opt); }) == ErrorKind::InvalidParameter);
  ThresholdOptions tight = opt;
  tight.delta_rel = 1e-12;
  CHECK(thrown_kind([&] { scan_threshold(f, g, 5.0, 10.0, crit, tight); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("monotonicity scan") {
  const auto f = ProblemParams::lambda_problem(3, 2.0, 2.0, 4.0, 1.0);
  const auto g = make_grid(3, 30.0, 300, 2.0);
  CHECK(thrown_kind([&] { monotonicity_scan(f, g, {1.0}); }) == ErrorKind::InvalidParameter);
  const auto r = monotonicity_scan(f, g, parse_list("geom:0.5:20:8"));
  REQUIRE(r.level.size() == 8);
  CHECK(r.ok());
  for (std::size_t i = 0; i + 1 < r.level.size(); ++i) CHECK(r.level[i + 1] < r.level[i]);
  CHECK(r.coupling.front() == doctest::Approx(0.5));
}

TEST_CASE("multiplicity rows are gated by the smallness condition") {
  const auto prm = ProblemParams::normalized(4, 1.0, 1.4, 1.0, 1.0, CriticalTerm::Sobolev);
  MultiplicityOptions opt;
  opt.normalized.smallness_bound = 0.5;
  // Minus branch skipped by a grid too coarse to matter: only the gate is under test.
  const auto t = multiplicity_experiment(prm, make_grid(4, 30.0, 200, 2.0), {2.0}, opt);
  REQUIRE(!t.rows.empty());
  CHECK(t.rows.front().gated);
  CHECK(t.rows.front().branch == Branch::Plus);
  CHECK(t.rows.front().reason.find("smallness") != std::string::npos);
  CHECK(thrown_kind([] {
          multiplicity_experiment(ProblemParams::lambda_problem(3, 1, 4, 3, 1), make_grid(3, 10, 50), {1.0});
        }) == ErrorKind::InvalidParameter);
}

TEST_CASE("run persistence") {
  const auto root = fresh_dir("persist");
  RunManifest m;
  m.command = "solve";
  m.config = {{"grid.n", "300"}, {"problem.N", "3"}};
  m.seeds = {42};
  m.wall_clock_s = 1.5;
  const std::vector<Artifact> arts = {{ArtifactKind::Solve, "ground_state.json", "{\"level\": 1}"},
                                      {ArtifactKind::Solve, "ground_state.csv", "r,u\n0,1\n"},
                                      {ArtifactKind::Fit, "gap.json", "{}"},
                                      {ArtifactKind::Table, "gap.csv", "c,gap\n"}};
  const auto dir = persist_run(root, m, "{\"S\": 5.47}", arts);
  for (const char* f : {"manifest.json", "constants.json", "solves/ground_state.json", "solves/ground_state.csv",
                        "fits/gap.json", "tables/gap.csv"})
    CHECK(fs::exists(dir / f));
  CHECK(m.artifacts.size() == 5);
  CHECK(m.code_version == code_version());

  // Same command, config and seeds: same directory and identical bytes.
  const std::string first = slurp(dir / "solves/ground_state.csv");
  RunManifest m2 = m;
  m2.wall_clock_s = 9.0;
  CHECK(persist_run(root, m2, "{\"S\": 5.47}", arts) == dir);
  CHECK(slurp(dir / "solves/ground_state.csv") == first);
  RunManifest m3 = m;
  m3.seeds = {43};
  CHECK(persist_run(root, m3, "{}", {}) != dir);

  // Manifest round trip.
  const auto back = RunManifest::from_json(slurp(dir / "manifest.json"));
  CHECK(back.command == m2.command);
  CHECK(back.config == m2.config);
  CHECK(back.seeds == m2.seeds);
  CHECK(back.artifacts == m2.artifacts);
  CHECK(back.run_id == m2.run_id);
  CHECK(back.wall_clock_s == 9.0);
  CHECK(thrown_kind([] { RunManifest::from_json("{\"command\": 1}"); }) == ErrorKind::InvalidConfiguration);

  CHECK(thrown_kind([&] { persist_run(root / "missing", m, "{}", {}); }) == ErrorKind::Io);
  CHECK(thrown_kind([&] { persist_run(root, m, "{}", {{ArtifactKind::Fit, "x.csv", ""}}); }) == ErrorKind::Io);
  CHECK(thrown_kind([&] { persist_run(root, m, "{}", {{ArtifactKind::Table, "../x.csv", ""}}); }) == ErrorKind::Io);
  fs::remove_all(root);
}
