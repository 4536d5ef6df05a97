#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "signalflow/equilibrium.hpp"

using namespace signalflow;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const SwitchedSolution& d0_solution() {
  static const SwitchedSolution s = switched_value_solve(sf_test::d0_thresholds(), sf_test::d0_game());
  return s;
}

const SwitchedSolution& d_solution() {
  static const SwitchedSolution s =
      switched_value_solve(sf_test::scrutiny_d_thresholds(), sf_test::scrutiny_d_game());
  return s;
}

Game constant_benefit(Game g) {
  g.benefit = BenefitFn::affine_logistic(0.0, 0.5, 0.0);
  return g;
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("corner best responses") {
  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const ValueFunction& vf = *s.values;
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    CHECK(corner_best_response(vf, 0.45, t) == BestResponse::Zero);
    CHECK(corner_best_response(vf, -3.0, t) == BestResponse::Zero);
  }
  for (double l : {0.5, 1.0, 4.0, 12.0}) {
    CHECK(corner_best_response(vf, l, SenderType::Good) == BestResponse::One);
    CHECK(corner_best_response(vf, l, SenderType::Bad) == BestResponse::Zero);
  }
}

TEST_CASE("check_prop1 on the d = 0 example") {
  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const EquilibriumReport r = check_prop1(*s.values);
  CHECK(r.verdict == Verdict::Pass);
  REQUIRE(r.conditions.size() == 6);
  for (const auto& c : r.conditions) {
    INFO(c.name);
    CHECK(c.pass);
    CHECK(c.pass == (c.strict ? c.margin > 0.0 : c.margin >= -1e-12));
  }
  REQUIRE(r.extrema);
  const RegionExtrema& ex = *r.extrema;
  // recompute the switched extrema from the table
  const auto& tb = s.table;
  CHECK(ex.sup_switched_bad >= *std::max_element(tb.bad.begin(), tb.bad.end()));
  CHECK(ex.inf_switched_good <= *std::min_element(tb.good.begin(), tb.good.end()));
  CHECK(ex.sup_scrutiny_bad <= 1.0 / 2.01 + 1e-12);
  CHECK(best_response_verify(*s.values).equilibrium);
}

TEST_CASE("check_prop1 not applicable and (b) failure") {
  const Game g = sf_test::d0_game();
  ValueFunction pool(StrategyProfile::pooling(), g);
  CHECK(check_prop1(pool).verdict == Verdict::NotApplicable);

  const SwitchedSolution& s = d0_solution();
  Game free_start = g;
  free_start.cost_bad = CostFn{0.0, 1.0};
  ValueFunction vf(s.profile, free_start);
  vf.attach(s.table);
  const EquilibriumReport r = check_prop1(vf);
  const ConditionRecord* b = r.find("(b)");
  REQUIRE(b);
  CHECK(b->lhs > 0.0);
  CHECK_FALSE(b->pass);
  CHECK(r.verdict == Verdict::Fail);
}

TEST_CASE("check_solution names the broken condition") {
  Thresholds t = sf_test::d0_thresholds();
  t.l_0 = LogOdds(std::log(1.5));
  const EquilibriumReport r = check_solution(switched_value_solve(t, sf_test::d0_game()));
  CHECK(r.verdict == Verdict::Fail);
  const ConditionRecord* e = r.find("(e)");
  REQUIRE(e);
  CHECK_FALSE(e->pass);
}

TEST_CASE("prop2 primitives") {
  const Game g = sf_test::d0_game();
  const EquilibriumReport r = check_prop2_primitives(sf_test::d0_l_under(), 0.5, g);
  const ConditionRecord* b = r.find("(b)");
  REQUIRE(b);
  CHECK(b->lhs == Approx(1.0 / 2.01 + 0.0 * 2.0 / (0.01 * 2.01)).epsilon(1e-12));
  CHECK(b->rhs == Approx(100.0 / 201.0).epsilon(1e-14));
  CHECK(std::abs(b->margin) < 1e-12);
  CHECK(b->pass);
  CHECK(r.verdict == Verdict::Pass);

  const EquilibriumReport flat = check_prop2_primitives(sf_test::d0_l_under(), 0.5, constant_benefit(g));
  CHECK_FALSE(flat.find("(a)")->pass);
  CHECK(flat.verdict == Verdict::Fail);
}

TEST_CASE("prop2 margins move the right way") {
  Game g = sf_test::d0_game();
  const double lu = sf_test::d0_l_under();
  double prev = -kInf;
  for (double a : {0.5, 0.8, 1.0, 1.5, 3.0}) {
    g.cost_bad.a = a;
    const double m = check_prop2_primitives(lu, 0.5, g).find("(b)")->margin;
    CHECK(m >= prev);
    prev = m;
  }
  g = sf_test::d0_game();
  prev = kInf;
  for (double r : {0.005, 0.01, 0.02, 0.05, 0.1}) {
    g.params.r = r;
    const double lhs = check_prop2_primitives(lu, 0.5, g).find("(b)")->lhs;
    CHECK(lhs <= prev);
    prev = lhs;
  }
}

TEST_CASE("prop3 primitives") {
  Game g = sf_test::scrutiny_d_game();
  const EquilibriumReport r = check_prop3_primitives(2.45, 2.95, 5.6, g, Tolerances{1e-12, 1e-9});
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.find("(d)")->pass);
  CHECK(r.min_margin() > 1e-3);

  g.params = ModelParams::symmetric(2.0, 0.1, 0.01);
  const ConditionRecord* f = check_prop3_primitives(0.0, 0.5, 2.0, g).find("(f)");
  CHECK(f->lhs == Approx(2.0 + std::log(0.1 / 2.1)).epsilon(1e-14));
  CHECK(f->lhs == Approx(2.0 - 3.044522).epsilon(1e-6));
  CHECK(f->pass);

  g.params = ModelParams::symmetric(2.0, 1e-300, 0.01);
  CHECK(check_prop3_primitives(0.0, 0.5, 300.0, g).find("(f)")->pass);
}

TEST_CASE("check_dtheta") {
  const Thresholds t = sf_test::scrutiny_d_thresholds();
  const Game sym = sf_test::scrutiny_d_game();
  const DthetaReport same = check_dtheta(t, sym, {});
  CHECK(same.symmetric.verdict == Verdict::Pass);
  const EquilibriumReport direct = check_solution(d_solution());
  CHECK(same.perturbed.verdict == direct.verdict);
  REQUIRE(same.perturbed.conditions.size() == direct.conditions.size());
  for (std::size_t i = 0; i < direct.conditions.size(); ++i)
    CHECK(same.perturbed.conditions[i].margin == direct.conditions[i].margin);

  Game g = sym;
  const double d = sym.params.d;
  g.params = ModelParams::type_dependent(6.5, d, d - 1e-3 * d, d + 1e-3 * d, 0.1);
  const DthetaReport near = check_dtheta(t, g, {1e-2 * d, 1e-3 * d});
  CHECK(near.verdict == Verdict::Pass);
  REQUIRE(near.stasis);
  CHECK(near.stasis->w < 1.0);
  CHECK(near.stasis->w > 0.0);

  g.params = ModelParams::type_dependent(6.5, d, 0.01, 0.6, 0.1);
  CHECK(check_dtheta(t, g, {}).verdict == Verdict::Fail);
}

TEST_CASE("scrutiny bounds") {
  Game g = sf_test::d0_game();
  CHECK_FALSE(scrutiny_bounds(g).applicable);
  g.params = ModelParams::symmetric(2.0, 0.1, 0.01);
  const ScrutinyBounds b = scrutiny_bounds(g);
  CHECK(b.applicable);
  CHECK(b.n_star == Approx(2000.0).epsilon(1e-14));
  CHECK(b.jump_length == Approx(3.045).epsilon(1e-3));
  CHECK(b.width_bound == Approx(2000.0 * std::log(21.0)).epsilon(1e-14));
  CHECK(scrutiny_bounds(constant_benefit(g)).n_star == 0.0);
}

TEST_CASE("best response verification") {
  const Game g = sf_test::d0_game();
  CHECK(best_response_verify(ValueFunction(StrategyProfile::pooling(), g)).max_violation == 0.0);

  ValueFunction ext(StrategyProfile::extremal(LogOdds(0.5), LogOdds::plus_infinity()), g);
  CHECK(best_response_verify(ext).max_violation <= 1e-12);

  const SwitchedSolution& s = d0_solution();
  ValueTable tb = s.table;
  for (double& e : tb.bad_effort) e = std::min(1.0, e + 0.1);
  ValueFunction bumped(s.profile, g);
  bumped.attach(tb);
  const BestResponseCheck b = best_response_verify(bumped);
  CHECK_FALSE(b.equilibrium);
  CHECK(b.type == SenderType::Bad);
  CHECK(b.max_violation > 1e-3);
}

TEST_CASE("equal positive efforts are never a best response") {
  const Game g = sf_test::d0_game();
  for (double e : {0.2, 0.5, 1.0}) {
    Region lo, mid, hi;
    lo.lower = LogOdds::minus_infinity();
    lo.upper = LogOdds(-1.0);
    lo.upper_closed = false;
    mid.lower = LogOdds(-1.0);
    mid.upper = LogOdds(1.0);
    mid.kind = RegionKind::Custom;
    mid.custom = {e, e};
    mid.upper_closed = false;
    hi.lower = LogOdds(1.0);
    hi.upper = LogOdds::plus_infinity();
    hi.upper_closed = true;
    ValueFunction vf(StrategyProfile({lo, mid, hi}, std::nullopt), g);
    CHECK_FALSE(best_response_verify(vf).equilibrium);
  }
}

TEST_CASE("pooling passes for random games") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const Game g = sf_test::random_game(rng);
    REQUIRE(best_response_verify(ValueFunction(StrategyProfile::pooling(), g)).max_violation == 0.0);
  }
}

TEST_CASE("threshold search") {
  const Game g = sf_test::d0_game();
  const double lu = sf_test::d0_l_under();
  SearchSpec spec;
  spec.l_under = ThresholdRange::at(lu);
  spec.l_0 = ThresholdRange::at(std::log(1.49));
  spec.l_1 = {std::log(1.49), 1.5};
  spec.l_over = ThresholdRange::at(kInf);
  spec.grid_points = 11;
  spec.refine_rounds = 1;
  spec.refine_halvings = 3;
  const SearchResult res = find_equilibrium(g, spec);
  REQUIRE(res.found);
  CHECK(res.report.verdict == Verdict::Pass);
  CHECK(res.best.l_1.value() > std::log(1.49));
  CHECK_FALSE(res.passing.empty());

  // an open set: nudge passing thresholds. The examples sit close to the edge where the
  // bad type's jump stops reaching l_1, so a full 1% of the width is too far.
  const Thresholds base{LogOdds(lu), LogOdds(std::log(1.4)), LogOdds(0.5), LogOdds::plus_infinity()};
  REQUIRE(check_solution(switched_value_solve(base, g)).verdict == Verdict::Pass);
  const double w = base.l_1.value() - lu;
  for (double du : {-0.001, 0.001})
    for (double d1 : {-0.001, 0.001}) {
      Thresholds t = base;
      t.l_under = LogOdds(lu + du * w);
      t.l_1 = LogOdds(t.l_1.value() + d1 * w);
      INFO(du << " " << d1);
      CHECK(check_solution(switched_value_solve(t, g)).verdict == Verdict::Pass);
    }
  {
    Thresholds t = base;
    t.l_under = LogOdds(lu + 0.01 * w);
    CHECK(check_solution(switched_value_solve(t, g)).verdict == Verdict::Fail);
  }

  const Thresholds td = sf_test::scrutiny_d_thresholds();
  const double wd = td.l_1.value() - td.l_under.value();
  for (double du : {-0.001, 0.001})
    for (double d1 : {-0.001, 0.001}) {
      Thresholds t = td;
      t.l_under = LogOdds(td.l_under.value() + du * wd);
      t.l_1 = LogOdds(td.l_1.value() + d1 * wd);
      INFO(du << " " << d1);
      CHECK(check_solution(switched_value_solve(t, sf_test::scrutiny_d_game())).verdict == Verdict::Pass);
    }

  const SearchResult flat = find_equilibrium(constant_benefit(g), spec);
  CHECK_FALSE(flat.found);
  CHECK(flat.report.verdict == Verdict::Fail);
  CHECK(flat.evaluated > 0);
}

TEST_CASE("d > 0 equilibria respect the width bound") {
  const SwitchedSolution& s = d_solution();
  REQUIRE(s.ok());
  CHECK(check_prop1(*s.values).verdict == Verdict::Pass);
  CHECK(best_response_verify(*s.values).equilibrium);
  const ScrutinyBounds b = scrutiny_bounds(sf_test::scrutiny_d_game());
  const Thresholds t = sf_test::scrutiny_d_thresholds();
  CHECK(t.l_over.value() - t.l_1.value() <= b.width_bound);
}

}
