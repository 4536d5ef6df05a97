#include <benchmark/benchmark.h>

#include <cmath>

#include "signalflow/discrete.hpp"
#include "signalflow/dynamics.hpp"
#include "signalflow/montecarlo.hpp"
#include "signalflow/values.hpp"

using namespace signalflow;

namespace {

Game example_game() {
  return {ModelParams::symmetric(2.0, 0.0, 0.01), BenefitFn::shifted_logistic(4.2), CostFn{0.1, 0.0},
          CostFn{200.0 / 201.0, 0.0}};
}

Thresholds example_thresholds() {
  return {LogOdds(std::log(2.0 / 3.0)), LogOdds(std::log(1.49)), LogOdds(0.5), LogOdds::plus_infinity()};
}

void BM_SwitchedSolve(benchmark::State& state) {
  const Game g = example_game();
  const Thresholds t = example_thresholds();
  for (auto _ : state) benchmark::DoNotOptimize(switched_value_solve(t, g));
}
BENCHMARK(BM_SwitchedSolve)->Unit(benchmark::kMillisecond);

void BM_ScrutinyValue(benchmark::State& state) {
  const Game g = example_game();
  const StrategyProfile p = StrategyProfile::extremal(LogOdds(0.5), LogOdds::plus_infinity());
  double l = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scrutiny_value(l, p, g, SenderType::Bad));
    l = l > 20.0 ? 0.5 : l + 0.37;
  }
}
BENCHMARK(BM_ScrutinyValue);

void BM_SimulatePath(benchmark::State& state) {
  const Game g = example_game();
  const SwitchedSolution s = switched_value_solve(example_thresholds(), g);
  SimOptions o;
  o.horizon = 1000.0;
  const Simulator sim(s.profile, g, o);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sim.run(0.3, SenderType::Bad, seed++));
}
BENCHMARK(BM_SimulatePath)->Unit(benchmark::kMicrosecond);

void BM_EstimateValue(benchmark::State& state) {
  const Game g = example_game();
  const SwitchedSolution s = switched_value_solve(example_thresholds(), g);
  MonteCarloOptions o;
  o.paths = static_cast<std::size_t>(state.range(0));
  o.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_value(s.profile, g, SenderType::Good, 0.3, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateValue)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DiscreteSearch(benchmark::State& state) {
  const DiscreteParams p{0.9, 1.0, 2.0, 0.0};
  DiscreteGrid grid;
  grid.divisions = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_discrete(p, grid));
}
BENCHMARK(BM_DiscreteSearch)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
