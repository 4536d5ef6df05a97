#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "signalflow/model.hpp"
#include "signalflow/strategy.hpp"

namespace signalflow {

// The sender's own effort choice, possibly off the profile.
struct EffortPolicy {
  enum class Kind { Profile, Constant, OtherType, ByRegion, Table };

  Kind kind = Kind::Profile;
  double constant = 0.0;
  std::map<RegionKind, double> by_region;  // falls back to the profile elsewhere
  EffortTable table;
  std::string label = "profile";

  static EffortPolicy profile();
  static EffortPolicy constant_effort(double e);
  static EffortPolicy other_type();
  static EffortPolicy region_override(std::map<RegionKind, double> m, std::string label);
  static EffortPolicy from_table(EffortTable t, std::string label);

  double effort(const Region& region, SenderType t, double l) const;
  // True when the effort does not vary with l inside the region.
  bool flat_on(const Region& region, SenderType t) const;
  void validate() const;
};

struct SimOptions {
  double horizon = 100.0;
  double rk_step = 0.005;     // time step in regions with l-dependent drift
  bool record_samples = true;
  bool exit_absorbing = true;
};

struct SimPath {
  std::uint64_t seed = 0;
  SenderType type = SenderType::Good;
  std::vector<double> event_times;
  std::vector<std::pair<double, double>> samples;  // (t, l)
  double payoff = 0.0;
  double tail_bound = 0.0;  // e^{-rT} beta(l_T) / r
  double horizon = 0.0;
  double terminal_l = 0.0;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

struct EnsembleSummary {
  std::size_t n = 0;
  std::size_t n_good = 0;
  double mean_payoff = 0.0;
  double var_payoff = 0.0;
  double mean_terminal_belief = 0.0;
  double var_terminal_belief = 0.0;
  std::vector<double> histogram_edges;
  std::vector<std::size_t> histogram;  // terminal l; infinities land in the end bins
};

struct PathEnsemble {
  std::vector<SimPath> paths;
  EnsembleSummary summary;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

class Simulator {
 public:
  Simulator(StrategyProfile profile, Game game, SimOptions opt = {});

  SimPath run(double l0, SenderType t, std::uint64_t seed,
              const EffortPolicy& policy = EffortPolicy::profile()) const;
  // Type drawn from the prior implied by l0 using the path's own stream.
  SimPath run_mixture(double l0, std::uint64_t seed,
                      const EffortPolicy& policy = EffortPolicy::profile()) const;

  double flow(double l0, double dt) const;

  const StrategyProfile& profile() const { return profile_; }
  const Game& game() const { return game_; }
  const SimOptions& options() const { return opt_; }

 private:
  struct State;
  template <class Rng>
  SimPath simulate(double l0, SenderType t, std::uint64_t seed, Rng& rng,
                   const EffortPolicy& policy) const;

  StrategyProfile profile_;
  Game game_;
  SimOptions opt_;
  double majorant_ = 0.0;
};

double flow_deterministic(double l0, const StrategyProfile& profile, const ModelParams& params,
                          double dt);

SimPath simulate_path(double l0, const StrategyProfile& profile, const Game& game, SenderType t,
                      double horizon, std::uint64_t seed,
                      const std::optional<EffortPolicy>& deviation = std::nullopt);

EnsembleSummary summarize(const std::vector<SimPath>& paths);

// type == nullopt draws each path's type from the prior.
PathEnsemble ensemble(const Simulator& sim, double l0, std::optional<SenderType> type,
                      std::size_t n_paths, std::uint64_t base_seed, bool keep_paths = true);

}  // namespace signalflow
