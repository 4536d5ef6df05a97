#include "signalflow/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "signalflow/parallel.hpp"

namespace signalflow {

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  const std::size_t n = x.size();
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x[i] - mean);
  }
  m.mean = mean;
  if (n > 1) m.se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return m;
}

Simulator make_sim(const StrategyProfile& profile, const Game& g, const MonteCarloOptions& opt) {
  SimOptions so;
  so.horizon = opt.horizon > 0.0 ? opt.horizon : default_horizon(g);
  so.rk_step = opt.rk_step;
  so.record_samples = false;
  return Simulator(profile, g, so);
}

std::uint64_t stream(std::uint64_t seed, SenderType t) {
  return derive_seed(seed, t == SenderType::Good ? 0x6f6f64 : 0x626164);
}

std::vector<double> payoffs(const Simulator& sim, SenderType t, double l0, std::size_t n,
                            std::uint64_t seed, const EffortPolicy& policy) {
  std::vector<double> out(n);
  const std::uint64_t base = stream(seed, t);
  parallel_for(n, [&](std::size_t i) { out[i] = sim.run(l0, t, derive_seed(base, i), policy).payoff; });
  return out;
}

}  // namespace

double default_horizon(const Game& g, double tail) {
  const double r = g.params.r;
  const double top = std::max({std::abs(g.benefit.max()), std::abs(g.benefit.min()), g.benefit.range()});
  if (top == 0.0) return 1.0;
  return std::max(1.0, std::log(top / (r * tail)) / r);
}

double tail_bound(const Game& g, double horizon) {
  return std::exp(-g.params.r * horizon) * g.benefit.range() / g.params.r;
}

ValueEstimate estimate_value(const StrategyProfile& profile, const Game& g, SenderType t, double l0,
                             const MonteCarloOptions& opt) {
  if (opt.paths < 2) throw std::invalid_argument("estimate_value needs at least two paths");
  const Simulator sim = make_sim(profile, g, opt);
  const Moments m = moments(payoffs(sim, t, l0, opt.paths, opt.seed, EffortPolicy::profile()));
  ValueEstimate e;
  e.mean = m.mean;
  e.std_error = m.se;
  e.n = opt.paths;
  e.tail_bound = tail_bound(g, sim.options().horizon);
  return e;
}

std::vector<DeviationSpec> standard_deviation_library(const StrategyProfile& profile) {
  std::vector<DeviationSpec> out;
  const bool sw = profile.has_switched();
  const bool sc = profile.find_kind(RegionKind::Scrutiny).has_value();
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      EffortPolicy p = EffortPolicy::constant_effort(e);
      out.push_back({t, p, p.label});
    }
    out.push_back({t, EffortPolicy::other_type(), "other type's effort"});
    if (sw) {
      out.push_back({t, EffortPolicy::region_override({{RegionKind::Switched, 0.0}}, "zero in switched"),
                     "zero in switched"});
      out.push_back({t, EffortPolicy::region_override({{RegionKind::Switched, 1.0}}, "full in switched"),
                     "full in switched"});
    }
    if (sc) {
      const double flipped = t == SenderType::Good ? 0.0 : 1.0;
      out.push_back({t,
                     EffortPolicy::region_override({{RegionKind::Scrutiny, flipped}}, "flipped in scrutiny"),
                     "flipped in scrutiny"});
    }
  }
  return out;
}

std::vector<DeviationResult> deviation_test(const ValueFunction& values,
                                            const std::vector<DeviationSpec>& deviations, double l0,
                                            const MonteCarloOptions& opt) {
  if (opt.paths < 2) throw std::invalid_argument("deviation_test needs at least two paths");
  const Simulator sim = make_sim(values.profile(), values.game(), opt);
  const double tail = tail_bound(values.game(), sim.options().horizon);
  std::vector<DeviationResult> out;
  std::vector<double> base[2];
  bool have[2] = {false, false};
  for (const DeviationSpec& spec : deviations) {
    spec.policy.validate();
    const int k = spec.type == SenderType::Good ? 0 : 1;
    if (!have[k]) {
      base[k] = payoffs(sim, spec.type, l0, opt.paths, opt.seed, EffortPolicy::profile());
      have[k] = true;
    }
    std::vector<double> dev = payoffs(sim, spec.type, l0, opt.paths, opt.seed, spec.policy);
    std::vector<double> diff(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) diff[i] = dev[i] - base[k][i];
    const Moments g = moments(diff);
    DeviationResult res;
    res.spec = spec;
    res.gain = g.mean;
    res.std_error = g.se;
    res.tail_bound = tail;
    res.deviation_value = moments(dev).mean;
    res.profile_value = moments(base[k]).mean;
    res.solver_value = values(spec.type, l0);
    res.profitable = res.gain > 3.0 * res.std_error + tail;
    out.push_back(std::move(res));
  }
  return out;
}

ReputationStats reputation_stats(const StrategyProfile& profile, const Game& g, double l0,
                                 const MonteCarloOptions& opt) {
  if (opt.paths < 2) throw std::invalid_argument("reputation_stats needs at least two paths");
  const Simulator sim = make_sim(profile, g, opt);
  ReputationStats st;
  st.reference = l0;
  st.prior = belief_of(l0);
  st.permanent = g.params.d_good > 0.0 && g.params.d_bad > 0.0;
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    std::vector<double> terminal(opt.paths);
    const std::uint64_t base = stream(opt.seed, t);
    parallel_for(opt.paths, [&](std::size_t i) {
      terminal[i] = sim.run(l0, t, derive_seed(base, i)).terminal_l;
    });
    TypeReputation tr;
    tr.type = t;
    tr.n = opt.paths;
    std::vector<double> mu(opt.paths);
    std::size_t above = 0, below = 0;
    for (std::size_t i = 0; i < opt.paths; ++i) {
      if (terminal[i] > l0) ++above;
      if (terminal[i] < l0) ++below;
      mu[i] = belief_of(terminal[i]);
    }
    const double n = static_cast<double>(opt.paths);
    tr.p_above = static_cast<double>(above) / n;
    tr.p_below = static_cast<double>(below) / n;
    tr.se_above = std::sqrt(tr.p_above * (1.0 - tr.p_above) / n);
    tr.se_below = std::sqrt(tr.p_below * (1.0 - tr.p_below) / n);
    const Moments m = moments(mu);
    tr.mean_belief = m.mean;
    tr.se_belief = m.se;
    (t == SenderType::Good ? st.good : st.bad) = tr;
  }
  st.mixture_mean_belief = st.prior * st.good.mean_belief + (1.0 - st.prior) * st.bad.mean_belief;
  st.mixture_se = std::hypot(st.prior * st.good.se_belief, (1.0 - st.prior) * st.bad.se_belief);
  return st;
}

}  // namespace signalflow
