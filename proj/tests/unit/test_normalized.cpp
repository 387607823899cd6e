#include <doctest.h>

#include "choquard/constants.hpp"
#include "choquard/error.hpp"
#include "choquard/shooting.hpp"
#include "choquard/solver.hpp"

#include <cmath>

using namespace choquard;

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

GridPtr branch_grid() { return make_grid(3, 60.0, 1000, 2.0); }

struct HlsConstants {
  double crit = 0;
  double bound = 0;
};

// N=3, alpha=1, q=3: critical level and smallness bound from independent quotients.
const HlsConstants& hls_constants() {
  static const HlsConstants c = [] {
    auto g = make_grid(3, 2000.0, 2000, 3.0);
    SharpInputs in;
    in.S = sobolev_constant_analytic(3);
    in.S_alpha = hls_quotient(talenti_field(g), 1.0);
    auto Q = shoot_local_ground_state(3, 3.0).field;
    in.C_Nq_pow_q = gn_constant_pow(3, 3.0, std::sqrt(mass(Q)));
    auto t = coefficient_table(3, 1.0, 4.0, 3.0, in);
    return HlsConstants{t.crit_level_hls, *hls_smallness_bound(t, in)};
  }();
  return c;
}

const NormalizedBranches& branches_nu10() {
  static const NormalizedBranches b =
      normalized_branches(ProblemParams::normalized(3, 1.0, 3.0, 10.0, 1.0, CriticalTerm::Hls), branch_grid());
  return b;
}

} // namespace

TEST_CASE("multiplier coefficient and identity") {
  const auto prm = ProblemParams::normalized(3, 1.0, 4.0, 1.0, 1.0, CriticalTerm::Hls);
  CHECK(multiplier_coefficient(prm) == doctest::Approx(0.25).epsilon(1e-14));
  Parts parts;
  parts.K = 3.0;
  parts.M = 1.0;
  parts.R = 5.0;
  parts.P = 2.0;
  CHECK(multiplier_from_identity(prm, parts) == doctest::Approx(0.5).epsilon(1e-14));

  // Sobolev-critical: (N+alpha-p(N-2))/(2p).
  const auto sob = ProblemParams::normalized(4, 1.0, 1.4, 1.0, 1.0, CriticalTerm::Sobolev);
  CHECK(multiplier_coefficient(sob) == doctest::Approx((5.0 - 2.8) / 2.8).epsilon(1e-14));
}

TEST_CASE("lower endpoint of the Choquard exponent is rejected") {
  CHECK(thrown_kind([] { ProblemParams::normalized(4, 1.0, 5.0 / 4.0, 1.0, 1.0, CriticalTerm::Sobolev).validate(); }) ==
        ErrorKind::InvalidParameter);
  auto prm = ProblemParams::normalized(4, 1.0, 1.4, 1.0, 1.0, CriticalTerm::Sobolev);
  prm.p = 5.0 / 4.0;
  CHECK(thrown_kind([&] { multiplier_coefficient(prm); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("coupling exponent of the frequency rescale") {
  CHECK(rescale_coupling_exponent(ProblemParams::normalized(3, 1.0, 3.0, 1.0, 1.0, CriticalTerm::Hls)) ==
        doctest::Approx(-0.75).epsilon(1e-14));
  // -(N+alpha-p(N-2))/2 for N=4, alpha=1, p=1.4.
  CHECK(rescale_coupling_exponent(ProblemParams::normalized(4, 1.0, 1.4, 1.0, 1.0, CriticalTerm::Sobolev)) ==
        doctest::Approx(-1.1).epsilon(1e-14));
}

TEST_CASE("both branches in the mass-subcritical regime") {
  const auto& b = branches_nu10();
  const auto& c = hls_constants();
  REQUIRE(b.plus);
  REQUIRE(b.minus);
  MESSAGE("m " << b.plus->level << " E " << b.minus->level << " crit " << c.crit << " bound " << c.bound);
  CHECK(10.0 < c.bound);
  for (const auto* r : {&*b.plus, &*b.minus}) {
    CHECK(r->converged);
    CHECK(r->pde_residual < 1e-6);
    CHECK(multiplier_check(*r) < 1e-3);
    CHECK(r->lambda_nu > 0.0);
    CHECK(std::abs(mass(r->u) - 1.0) < 1e-8);
    CHECK(r->u.positive_interior());
  }
  CHECK(b.plus->branch == Branch::Plus);
  CHECK(b.minus->branch == Branch::Minus);
  CHECK(b.plus->fiber_second > 0.0);
  CHECK(b.minus->fiber_second < 0.0);
  CHECK(b.plus->level < 0.0);
  CHECK(b.minus->level > 0.0);
  CHECK(b.minus->level < c.crit);

  // Fiber classification of the returned P- field, from scratch.
  const auto cls = mass_fiber_classify(b.minus->params, b.minus->u);
  REQUIRE(cls.minus);
  CHECK(std::abs(std::log(cls.minus->t)) < 1e-3);
}

TEST_CASE("local-minimum branch is gated") {
  const auto& c = hls_constants();
  NormalizedOptions opt;
  opt.smallness_bound = c.bound;
  const double nu = 1.2 * c.bound;
  const auto b = normalized_branches(ProblemParams::normalized(3, 1.0, 3.0, nu, 1.0, CriticalTerm::Hls),
                                     branch_grid(), {}, opt);
  CHECK_FALSE(b.plus);
  CHECK(b.plus_reason.find("smallness") != std::string::npos);

  // q >= 2 + 4/N: only the mountain-pass branch.
  const auto b4 = normalized_branches(ProblemParams::normalized(3, 1.0, 4.0, 1.0, 1.0, CriticalTerm::Hls),
                                      branch_grid());
  CHECK_FALSE(b4.plus);
  REQUIRE(b4.minus);
  MESSAGE("q=4 level " << b4.minus->level << " res " << b4.minus->pde_residual);
  CHECK(b4.minus->converged);
  CHECK(b4.minus->level > 0.0);
  CHECK(b4.minus->level < c.crit);
  CHECK(multiplier_check(*b4.minus) < 1e-3);
}

TEST_CASE("unit multiplier gives the identity rescale") {
  // A frequency-one solution is a normalized solution with lambda_nu = 1.
  const double nu = 10.0;
  const auto gs = ground_state(ProblemParams::general(3, 1.0, 4.0, 3.0, 1.0, nu), branch_grid());
  REQUIRE(gs.converged);
  NormalizedBranchResult r;
  r.params = ProblemParams::normalized(3, 1.0, 3.0, nu, std::sqrt(mass(gs.u)), CriticalTerm::Hls);
  r.u = gs.u;
  r.branch = Branch::Minus;
  r.lambda_nu = 1.0;
  r.converged = true;
  const auto s = second_solution_via_rescale(r);
  CHECK(s.coupling == doctest::Approx(nu).epsilon(1e-14));
  CHECK(s.params.lambda == doctest::Approx(nu).epsilon(1e-14));
  CHECK(s.field.grid().r_max() == doctest::Approx(gs.u.grid().r_max()).epsilon(1e-14));
  for (std::size_t i = 0; i < s.field.size(); ++i) REQUIRE(s.field[i] == doctest::Approx(gs.u[i]).epsilon(1e-14));
  CHECK(s.action == doctest::Approx(gs.level).epsilon(1e-8));
  CHECK(s.energy == doctest::Approx(gs.level - 0.5 * mass(gs.u)).epsilon(1e-8));
}

TEST_CASE("rescaled mountain-pass solution lies above the ground state") {
  const auto prm = ProblemParams::normalized(3, 1.0, 3.0, 1.0, 1.0, CriticalTerm::Hls);
  const auto m = normalized_branch(prm, branch_grid(), Branch::Minus, InitSpec::bubble(0.5));
  REQUIRE(m.converged);
  CHECK(multiplier_check(m) < 1e-3);
  const auto s = second_solution_via_rescale(m);
  CHECK(s.pde_residual < 1e-4);
  CHECK(s.coupling == doctest::Approx(std::pow(m.lambda_nu, -0.75)).epsilon(1e-12));
  CHECK(s.energy == doctest::Approx(m.level).epsilon(1e-6));
  const auto gs = ground_state(s.params, branch_grid());
  const double e_ground = gs.level - 0.5 * mass(gs.u);
  MESSAGE("coupling " << s.coupling << " candidate " << s.energy << " ground " << e_ground);
  REQUIRE(gs.converged);
  CHECK(s.energy > e_ground + 0.1);
}
