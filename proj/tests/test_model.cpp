#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "signalflow/model.hpp"

using namespace signalflow;
using doctest::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("model") {

TEST_CASE("jump target examples") {
  CHECK(jump_target(0.0, 0.3, 0.3, ModelParams::symmetric(2, 0.5, 0.1)) == 0.0);
  CHECK(jump_target(0.0, 1.0, 0.0, ModelParams::symmetric(2, 0.0, 0.1)) == -kInf);
  CHECK(jump_target(1.0, 0.0, 0.5, ModelParams::symmetric(2, 0.0, 0.1)) ==
        Approx(1.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(jump_target(5.0, 1.0, 0.0, ModelParams::symmetric(2, 0.5, 0.1)) ==
        Approx(5.0 - std::log(5.0)).epsilon(1e-15));
  CHECK(jump_target(5.0, 1.0, 0.0, ModelParams::symmetric(2, 0.5, 0.1)) == Approx(3.390562).epsilon(1e-7));
}

TEST_CASE("zero over zero keeps the belief") {
  const ModelParams p = ModelParams::symmetric(2, 0.0, 0.1);
  CHECK(log_rate_ratio(1.0, 1.0, p) == 0.0);
  CHECK(jump_target(-3.25, 1.0, 1.0, p) == -3.25);
  CHECK(jump_target(LogOdds::plus_infinity(), 1.0, 0.0, p).is_plus_infinity());
}

TEST_CASE("drift examples") {
  CHECK(drift(1.0, 0.0, ModelParams::symmetric(2, 0.3, 0.1)) == 2.0);
  CHECK(drift(0.4, 0.4, ModelParams::symmetric(2, 0.3, 0.1)) == 0.0);
  CHECK(drift(0.0, 0.0, ModelParams::type_dependent(2, 0.5, 0.4, 0.6, 0.1)) == Approx(0.2).epsilon(1e-15));
}

TEST_CASE("cost examples") {
  const Game g = sf_test::d0_game();
  CHECK(g.cost_good(1.0) == Approx(0.1));
  CHECK(g.cost_good.marginal(1.0) == Approx(0.1));
  CHECK(g.cost_bad(0.0) == 0.0);
  CHECK(g.cost_bad.marginal(0.0) == Approx(200.0 / 201.0));
  const CostFn c{0.1, 0.2};
  CHECK(c(0.5) == Approx(0.1).epsilon(1e-15));
  CHECK(c.marginal(0.5) == Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(c(1.5), std::domain_error);
  CHECK_THROWS_AS((CostFn{0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CostFn{-1.0, 0.5}.validate()), std::invalid_argument);
}

TEST_CASE("single crossing") {
  const Game g = sf_test::d0_game();
  CHECK(strong_single_crossing(g.cost_good, g.cost_bad));
  CHECK_FALSE(strong_single_crossing(g.cost_bad, g.cost_good));
  CHECK_FALSE(strong_single_crossing(CostFn{0.5, 0.5}, CostFn{1.5, 0.0}));
}

TEST_CASE("benefit examples") {
  CHECK(BenefitFn::shifted_logistic(4.2)(4.2) == 0.5);
  CHECK(BenefitFn::shifted_logistic(0.0)(0.0) == 0.5);
  const BenefitFn b = BenefitFn::affine_logistic(1.0, -0.5, 2.0);
  CHECK(b(kInf) == b.max());
  CHECK(b(-kInf) == b.min());
  CHECK(b.max() == 1.5);
}

TEST_CASE("benefit monotone on a fine grid") {
  const BenefitFn b = BenefitFn::shifted_logistic(4.2);
  double prev = b(-kInf);
  for (int i = 0; i <= 10000; ++i) {
    const double l = -60.0 + 120.0 * i / 10000.0;
    const double v = b(l);
    REQUIRE(v >= prev);
    prev = v;
  }
  CHECK(b(kInf) >= prev);
}

TEST_CASE("log-odds and beliefs") {
  CHECK(LogOdds::from_belief(0.0).is_minus_infinity());
  CHECK(LogOdds::from_belief(1.0).is_plus_infinity());
  CHECK(LogOdds::from_belief(0.5).value() == 0.0);
  CHECK(LogOdds::plus_infinity().belief() == 1.0);
  CHECK(LogOdds::minus_infinity().belief() == 0.0);
  CHECK(belief_of(std::log(3.0)) == Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(LogOdds(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(LogOdds::from_belief(1.5), std::domain_error);
  CHECK(LogOdds(1.0) < LogOdds::plus_infinity());
  CHECK(format_log_odds(LogOdds::minus_infinity()) == "-inf");
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(ModelParams::symmetric(2, 0.1, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::symmetric(0, 0.1, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::symmetric(2, -0.1, 0.1).validate(), std::invalid_argument);
  CHECK(ModelParams::symmetric(2, 0.1, 0.1).is_symmetric());
  CHECK_FALSE(ModelParams::type_dependent(2, 0.1, 0.09, 0.11, 0.1).is_symmetric());
  CHECK(parse_sender_type("good") == SenderType::Good);
  CHECK_THROWS(parse_sender_type("ugly"));
}

TEST_CASE("equal efforts never move the belief") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double e = u(rng);
    const ModelParams p = ModelParams::symmetric(0.1 + 5 * u(rng), (i % 3) ? u(rng) : 0.0, 0.1);
    const double l = -30 + 60 * u(rng);
    REQUIRE(jump_target(l, e, e, p) == l);
    REQUIRE(drift(e, e, p) == 0.0);
  }
}

TEST_CASE("jump target monotone in efforts") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const ModelParams p = ModelParams::symmetric(0.1 + 5 * u(rng), 0.01 + u(rng), 0.1);
    const double l = -10 + 20 * u(rng);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-9) continue;
    const double e = u(rng);
    REQUIRE(jump_target(l, b, e, p) < jump_target(l, a, e, p));
    REQUIRE(jump_target(l, e, b, p) > jump_target(l, e, a, p));
  }
}

TEST_CASE("jump length against a 50-digit oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const double lam = 0.05 + 10 * u(rng);
    const double dg = u(rng), db = u(rng);
    const ModelParams p = ModelParams::type_dependent(lam, 0.5 * (dg + db), dg, db, 0.1);
    const double eg = u(rng), eb = u(rng);
    const double l = -20 + 40 * u(rng);
    const double got = jump_target(l, eg, eb, p);
    const double want = sf_test::jump_oracle(l, eg, eb, lam, dg, db);
    const double scale = std::max({1.0, std::abs(l), std::abs(want - l)});
    worst = std::max(worst, std::abs(got - want) / scale);
  }
  CHECK(worst < 4 * std::numeric_limits<double>::epsilon());
}

}
