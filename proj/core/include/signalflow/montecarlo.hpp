#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signalflow/dynamics.hpp"
#include "signalflow/values.hpp"

namespace signalflow {

struct MonteCarloOptions {
  double horizon = 0.0;  // 0 picks default_horizon
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double rk_step = 0.005;
};

// Smallest T with e^{-rT} max|beta| / r <= tail.
double default_horizon(const Game& g, double tail = 1e-3);
double tail_bound(const Game& g, double horizon);

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;
  std::size_t n = 0;
};

ValueEstimate estimate_value(const StrategyProfile& profile, const Game& g, SenderType t, double l0,
                             const MonteCarloOptions& opt);

struct DeviationSpec {
  SenderType type = SenderType::Good;
  EffortPolicy policy;
  std::string label;
};

struct DeviationResult {
  DeviationSpec spec;
  double gain = 0.0;        // paired mean of J(deviation) - J(profile)
  double std_error = 0.0;
  double tail_bound = 0.0;
  double deviation_value = 0.0;
  double profile_value = 0.0;
  double solver_value = 0.0;
  bool profitable = false;  // gain > 3 std_error + tail_bound
};

std::vector<DeviationSpec> standard_deviation_library(const StrategyProfile& profile);

std::vector<DeviationResult> deviation_test(const ValueFunction& values,
                                            const std::vector<DeviationSpec>& deviations, double l0,
                                            const MonteCarloOptions& opt);

struct TypeReputation {
  SenderType type = SenderType::Good;
  std::size_t n = 0;
  double p_above = 0.0;
  double se_above = 0.0;
  double p_below = 0.0;
  double se_below = 0.0;
  double mean_belief = 0.0;
  double se_belief = 0.0;
};

struct ReputationStats {
  double reference = 0.0;
  double prior = 0.5;
  TypeReputation good;
  TypeReputation bad;
  // prior-weighted combination of the two strata
  double mixture_mean_belief = 0.0;
  double mixture_se = 0.0;
  bool permanent = false;  // both baseline rates positive
};

ReputationStats reputation_stats(const StrategyProfile& profile, const Game& g, double l0,
                                 const MonteCarloOptions& opt);

}  // namespace signalflow
