#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "signalflow/values.hpp"

using namespace signalflow;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const SwitchedSolution& d0_solution() {
  static const SwitchedSolution s = switched_value_solve(sf_test::d0_thresholds(), sf_test::d0_game());
  return s;
}

}  // namespace

TEST_SUITE("values") {

TEST_CASE("pooling value") {
  const ModelParams p = ModelParams::symmetric(2, 0, 0.01);
  const BenefitFn half = BenefitFn::affine_logistic(0.0, 0.5, 0.0);
  CHECK(pooling_value(LogOdds(3.0), p, half) == Approx(50.0).epsilon(1e-15));
  const BenefitFn b = BenefitFn::affine_logistic(1.0, -0.25, 2.0);
  CHECK(pooling_value(LogOdds::minus_infinity(), p, b) == -25.0);
  CHECK(pooling_value(LogOdds::plus_infinity(), p, b) == 175.0);
  // 100 (2/3) / (2/3 + e^4.2)
  const double lu = sf_test::d0_l_under();
  const double want = 100.0 * (2.0 / 3.0) / (2.0 / 3.0 + std::exp(4.2));
  CHECK(pooling_value(LogOdds(lu), p, BenefitFn::shifted_logistic(4.2)) == Approx(want).epsilon(1e-13));
  CHECK(want == Approx(0.98981).epsilon(1e-5));
}

TEST_CASE("scrutiny limit with an infinite region") {
  const Game g = sf_test::d0_game();
  const StrategyProfile p = StrategyProfile::extremal(LogOdds(0.5), LogOdds::plus_infinity());
  const double limit = 1.0 / 2.01;
  ValueFunction vf(p, g);
  const RegionCurve* c = vf.curve(SenderType::Bad, *p.find_kind(RegionKind::Scrutiny));
  REQUIRE(c);
  CHECK(c->target_limit() == Approx(limit).epsilon(1e-12));
  CHECK(std::abs(scrutiny_value(60.0, p, g, SenderType::Bad) - limit) < 1e-8);
  CHECK(std::abs(vf(SenderType::Bad, 80.0) - limit) < 1e-8);
  CHECK(limit == Approx(0.497512).epsilon(1e-6));
}

TEST_CASE("scrutiny value matching at a finite upper end") {
  const Game g = sf_test::scrutiny_d_game();
  const StrategyProfile p = StrategyProfile::extremal(LogOdds(2.95), LogOdds(5.6));
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    const double near = scrutiny_value(5.6 - 1e-9, p, g, t);
    CHECK(near == Approx(g.pooling_value(5.6)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(scrutiny_value(1.0, p, g, SenderType::Good), std::domain_error);
  CHECK_THROWS_AS(scrutiny_value(6.0, p, g, SenderType::Good), std::domain_error);
}

TEST_CASE("scrutiny closed form against backward RK4") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int set = 0; set < 4; ++set) {
    sf_test::ScrutinyCase c;
    c.lambda = 1.0 + 3.0 * u(rng);
    c.d = set % 2 ? 0.1 : 0.0;
    c.r = 0.01 + 0.1 * u(rng);
    c.k = -2.0 + 4.0 * u(rng);
    c.l_1 = -1.0 + 2.0 * u(rng);
    c.l_over = c.d > 0 ? c.l_1 + 0.5 + 1.5 * u(rng) : (set == 0 ? kInf : c.l_1 + 3.0);
    c.cost_good_at_one = 0.05;
    Game g{ModelParams::symmetric(c.lambda, c.d, c.r), BenefitFn::shifted_logistic(c.k),
           CostFn{0.05, 0.0}, CostFn{2.0, 0.0}};
    const StrategyProfile p = StrategyProfile::extremal(LogOdds(c.l_1), LogOdds(c.l_over));
    ValueFunction vf(p, g);
    const double top = std::isfinite(c.l_over) ? c.l_over : c.l_1 + 20.0;
    std::vector<double> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(c.l_1 + (top - c.l_1) * i / 100.0);
    for (bool good : {true, false}) {
      const auto want = sf_test::scrutiny_rk4(c, good, pts);
      const SenderType t = good ? SenderType::Good : SenderType::Bad;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double got = vf(t, pts[i]);
        REQUIRE(std::abs(got - want[i]) <= 1e-6 * std::abs(want[i]));
      }
    }
  }
}

TEST_CASE("scrutiny values strictly increasing and bounded") {
  for (const Game& g : {sf_test::d0_game(), sf_test::scrutiny_d_game()}) {
    const bool d0 = g.params.d == 0.0;
    const StrategyProfile p = d0 ? StrategyProfile::extremal(LogOdds(0.5), LogOdds::plus_infinity())
                                 : StrategyProfile::extremal(LogOdds(2.95), LogOdds(5.6));
    ValueFunction vf(p, g);
    const double lo = d0 ? 0.5 : 2.95;
    const double hi = d0 ? 20.0 : 5.6;
    for (SenderType t : {SenderType::Good, SenderType::Bad}) {
      double prev = -kInf;
      for (int i = 0; i < 2000; ++i) {
        const double l = lo + (hi - lo) * i / 2000.0;
        const double v = vf(t, l);
        REQUIRE(v > prev);
        REQUIRE(v >= g.benefit.min() / g.params.r);
        REQUIRE(v <= g.benefit.max() / g.params.r);
        prev = v;
      }
    }
  }
}

TEST_CASE("degenerate switched region") {
  const Game g = sf_test::d0_game();
  const double lu = sf_test::d0_l_under();
  const Thresholds t{LogOdds(lu), LogOdds(lu), LogOdds(0.5), LogOdds::plus_infinity()};
  const SwitchedSolution s = switched_value_solve(t, g);
  REQUIRE(s.ok());
  CHECK(s.table.empty());
  CHECK(s.table.bad_at_under == g.pooling_value(lu));
  CHECK((*s.values)(SenderType::Bad, lu) == g.pooling_value(lu));
}

TEST_CASE("switched solve on the d = 0 example") {
  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const ValueTable& tb = s.table;
  const Game g = sf_test::d0_game();
  REQUIRE(tb.grid.size() > 100);
  for (std::size_t i = 0; i < tb.grid.size(); ++i) {
    REQUIRE(tb.bad_effort[i] > 0.0);
    REQUIRE(tb.bad_effort[i] < 1.0);
    if (i) REQUIRE(tb.bad[i] < tb.bad[i - 1]);
    if (i) REQUIRE(tb.good[i] > tb.good[i - 1]);
    // first-order condition with the linear cost pins the value at the jump target
    const double gap = tb.bad[i] - (*s.values)(SenderType::Bad, tb.jump[i]);
    REQUIRE(std::abs(g.params.lambda * gap - g.cost_bad.marginal(tb.bad_effort[i])) < 1e-8);
    REQUIRE(gap > 0.0);
    REQUIRE(tb.good[i] >= 0.0);
    REQUIRE(tb.bad[i] <= 100.0);
  }
  CHECK(validate_profile(s.profile).empty());
}

TEST_CASE("switched solve reports a construction failure") {
  Thresholds t = sf_test::d0_thresholds();
  t.l_0 = LogOdds(std::log(1.5));
  const SwitchedSolution s = switched_value_solve(t, sf_test::d0_game());
  REQUIRE_FALSE(s.ok());
  CHECK(s.failure->condition == "(e)");
  CHECK(s.failure->at > t.l_under.value());
  CHECK(s.failure->at <= t.l_0.value());
  CHECK_FALSE(s.failure->message.empty());
}

TEST_CASE("switched values sit inside the reach sandwich") {
  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const Game g = sf_test::d0_game();
  const Region& sw = s.profile.regions()[*s.profile.find_kind(RegionKind::Switched)];
  const double lu = sf_test::d0_l_under();
  for (std::size_t i = 0; i < s.table.grid.size(); i += 10) {
    const double l = s.table.grid[i];
    const ValueBounds b = value_bounds_switched(l, lu, sw.bad_effort, g.params, g.benefit);
    REQUIRE(b.lower <= b.upper);
    for (double v : {s.table.good[i], s.table.bad[i]}) {
      REQUIRE(v >= b.lower - 1e-9);
      REQUIRE(v <= b.upper + 1e-9);
    }
  }
}

TEST_CASE("value bounds") {
  const Game g = sf_test::d0_game();
  const double lu = sf_test::d0_l_under();
  ValueBounds b = value_bounds_switched(lu, lu, 0.3, g.params, g.benefit);
  CHECK(b.lower == Approx(g.pooling_value(lu)).epsilon(1e-14));
  CHECK(b.upper == Approx(g.pooling_value(lu)).epsilon(1e-14));
  const double l = lu + 0.2, eps = 0.4;
  b = value_bounds_switched(l, lu, eps, g.params, g.benefit);
  const double disc = std::exp((lu - l) * (1 + g.params.r / g.params.lambda) / eps);
  const double reach = std::exp((lu - l) / eps);
  CHECK(b.lower == Approx(disc * g.pooling_value(lu)).epsilon(1e-12));
  CHECK(b.upper == Approx(disc * g.pooling_value(lu) + (1 - reach) * 100.0).epsilon(1e-12));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const ValueBounds q = value_bounds_switched(lu + 3 * u(rng), lu, 0.01 + u(rng), g.params, g.benefit);
    REQUIRE(q.lower <= q.upper);
  }
  CHECK_THROWS_AS(value_bounds_switched(l, lu, 0.0, g.params, g.benefit), std::domain_error);
}

TEST_CASE("stasis values") {
  const Thresholds t = sf_test::d0_thresholds();
  const double lu = t.l_under.value();
  const StrategyProfile p = StrategyProfile::canonical(t, EffortTable{{lu}, {0.5}});
  Game g = sf_test::d0_game();
  g.params = ModelParams::type_dependent(2.0, 0.5, 0.5, 0.5, 0.01);
  StasisValues s = stasis_values(ValueFunction(p, g), 0.5);
  CHECK(s.w == 1.0);
  CHECK(s.good == g.pooling_value(lu));
  CHECK(s.bad == g.pooling_value(lu));

  g.params = ModelParams::type_dependent(2.0, 0.5, 0.49, 0.51, 0.01);
  s = stasis_values(ValueFunction(p, g), 0.5);
  CHECK(s.w == Approx(0.98).epsilon(1e-14));
  CHECK(s.lambda_bad == Approx(1.51).epsilon(1e-15));
  CHECK(s.j_minus == Approx(lu + std::log(2.49 / 2.51)).epsilon(1e-15));
  CHECK(s.j_minus - lu == Approx(-0.008).epsilon(0.01));
  CHECK(s.j_minus <= lu);
  CHECK(s.j_plus == Approx(lu + std::log(2.49 / 1.51)).epsilon(1e-15));
  CHECK(s.good > g.benefit.min() / g.params.r);
  CHECK(s.bad < g.benefit.max() / g.params.r);
}

TEST_CASE("hjb residual") {
  const Game g = sf_test::d0_game();
  ValueFunction pool(StrategyProfile::pooling(), g);
  CHECK(hjb_residual(pool, SenderType::Good).max_abs == 0.0);
  CHECK(hjb_residual(pool, SenderType::Bad).points == 0);

  ValueFunction ext(StrategyProfile::extremal(LogOdds(0.5), LogOdds::plus_infinity()), g);
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    const ResidualReport r = hjb_residual(ext, t, 1e-3, 30.0);
    CHECK(r.points > 1000);
    CHECK(r.max_abs < 1e-6);
  }

  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const double scale = g.benefit.range() / g.params.r;
  for (SenderType t : {SenderType::Good, SenderType::Bad})
    CHECK(hjb_residual(*s.values, t).max_abs < 1e-5 * scale);

  ValueFunction corrupted = *s.values;
  ValueTable tb = s.table;
  for (double& v : tb.good) v += 0.1;
  corrupted.attach(tb);
  CHECK(hjb_residual(corrupted, SenderType::Good).max_abs >= g.params.r * 0.1);
}

}
