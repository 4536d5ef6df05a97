#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "signalflow/montecarlo.hpp"

using namespace signalflow;
using doctest::Approx;

namespace {

const SwitchedSolution& d0_solution() {
  static const SwitchedSolution s = switched_value_solve(sf_test::d0_thresholds(), sf_test::d0_game());
  return s;
}

const SwitchedSolution& d_solution() {
  static const SwitchedSolution s =
      switched_value_solve(sf_test::scrutiny_d_thresholds(), sf_test::scrutiny_d_game());
  return s;
}

MonteCarloOptions mc(std::size_t n, std::uint64_t seed) {
  MonteCarloOptions o;
  o.paths = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("horizon and tail") {
  const Game g = sf_test::d0_game();
  const double T = default_horizon(g);
  CHECK(tail_bound(g, T) == Approx(1e-3).epsilon(1e-9));
  CHECK(T == Approx(std::log(1e5) / 0.01).epsilon(1e-12));
  Game neg = g;
  neg.benefit = BenefitFn::affine_logistic(0.0, -1.0, 2.0);
  CHECK(tail_bound(neg, default_horizon(neg)) <= 1e-3 * (1 + 1e-12));
}

TEST_CASE("pooling estimate is exact") {
  const Game g = sf_test::d0_game();
  MonteCarloOptions o = mc(64, 3);
  o.horizon = 200.0;
  const ValueEstimate e = estimate_value(StrategyProfile::pooling(), g, SenderType::Bad, 2.0, o);
  CHECK(e.mean == Approx((1 - std::exp(-2.0)) * g.benefit(2.0) / 0.01).epsilon(1e-12));
  CHECK(e.std_error == 0.0);
  CHECK(e.tail_bound == Approx(std::exp(-2.0) * 100.0).epsilon(1e-14));
  CHECK_THROWS_AS(estimate_value(StrategyProfile::pooling(), g, SenderType::Bad, 2.0, mc(1, 3)),
                  std::invalid_argument);
}

TEST_CASE("estimates agree with the solver") {
  const SwitchedSolution& s = d0_solution();
  REQUIRE(s.ok());
  const Game g = sf_test::d0_game();
  const double lu = sf_test::d0_l_under();
  const double l0 = std::log(1.49);
  std::vector<double> points;
  for (int i = 1; i <= 5; ++i) points.push_back(lu + (l0 - lu) * i / 5.0);
  for (double l : {0.5, 1.0, 2.0, 4.0, 8.0}) points.push_back(l);
  for (double l : points)
    for (SenderType t : {SenderType::Good, SenderType::Bad}) {
      const ValueEstimate e = estimate_value(s.profile, g, t, l, mc(4000, 17));
      const double v = (*s.values)(t, l);
      INFO(to_string(t) << " at " << l << ": " << e.mean << " +- " << e.std_error << " vs " << v);
      CHECK(std::abs(e.mean - v) <= 3 * e.std_error + e.tail_bound);
    }
}

TEST_CASE("standard error scaling") {
  const SwitchedSolution& s = d0_solution();
  const Game g = sf_test::d0_game();
  const ValueEstimate a = estimate_value(s.profile, g, SenderType::Bad, 0.2, mc(5000, 8));
  const ValueEstimate b = estimate_value(s.profile, g, SenderType::Bad, 0.2, mc(10000, 8));
  CHECK(b.std_error / a.std_error == Approx(1 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("deviation gains") {
  const SwitchedSolution& s = d0_solution();
  const double l0 = std::log(1.49);
  const auto same = deviation_test(*s.values, {{SenderType::Bad, EffortPolicy::profile(), "identity"}},
                                   l0, mc(500, 2));
  CHECK(same[0].gain == 0.0);
  CHECK_FALSE(same[0].profitable);

  const auto lib = standard_deviation_library(s.profile);
  CHECK(lib.size() == 18);
  const auto res = deviation_test(*s.values, lib, l0, mc(3000, 4));
  for (const auto& d : res) {
    INFO(to_string(d.spec.type) << " " << d.spec.label << " gain " << d.gain << " se " << d.std_error);
    CHECK_FALSE(d.profitable);
    CHECK(d.solver_value == (*s.values)(d.spec.type, l0));
  }
}

TEST_CASE("costly deviation under pooling") {
  const Game g = sf_test::d0_game();
  const ValueFunction vf(StrategyProfile::pooling(), g);
  MonteCarloOptions o = mc(100, 5);
  o.horizon = 300.0;
  const auto res = deviation_test(vf, {{SenderType::Good, EffortPolicy::constant_effort(0.5), "half"}}, 1.0, o);
  const double want = -g.cost_good(0.5) * (1 - std::exp(-3.0)) / 0.01;
  CHECK(res[0].gain < 0.0);
  CHECK(res[0].gain == Approx(want).epsilon(1e-10));
}

TEST_CASE("reputation statistics") {
  const Game gp = sf_test::scrutiny_d_game();
  const ReputationStats pool = reputation_stats(StrategyProfile::pooling(), gp, 1.0, mc(200, 1));
  CHECK(pool.good.p_above == 0.0);
  CHECK(pool.good.p_below == 0.0);
  CHECK(pool.bad.p_above == 0.0);
  CHECK(pool.bad.p_below == 0.0);

  const SwitchedSolution& s = d_solution();
  REQUIRE(s.ok());
  const double l0 = sf_test::scrutiny_d_thresholds().l_0.value();
  const ReputationStats st = reputation_stats(s.profile, gp, l0, mc(100000, 3));
  CHECK(st.permanent);
  CHECK(st.reference == l0);
  CHECK(st.bad.p_above > 3 * st.bad.se_above);
  CHECK(st.good.p_below > 3 * st.good.se_below);
  for (const TypeReputation* t : {&st.good, &st.bad}) {
    CHECK(t->p_above >= 0.0);
    CHECK(t->p_above + t->p_below <= 1.0);
    CHECK(t->se_above >= 0.0);
  }
  CHECK(std::abs(st.mixture_mean_belief - st.prior) < 3 * st.mixture_se);
  // beliefs drift toward the truth on average
  CHECK(st.good.mean_belief + 3 * st.good.se_belief >= st.prior);
  CHECK(st.bad.mean_belief - 3 * st.bad.se_belief <= st.prior);
}

}
