#include "signalflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "quadrature.hpp"
#include "signalflow/parallel.hpp"

namespace signalflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double uniform() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
};

// int_{t0}^{t1} e^{-rs} ds
double discount(double r, double t0, double t1) {
  if (t1 <= t0) return 0.0;
  return std::exp(-r * t0) * -std::expm1(-r * (t1 - t0)) / r;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

EffortPolicy EffortPolicy::profile() { return {}; }

EffortPolicy EffortPolicy::constant_effort(double e) {
  EffortPolicy p;
  p.kind = Kind::Constant;
  p.constant = e;
  char buf[32];
  std::snprintf(buf, sizeof buf, "constant %.4g", e);
  p.label = buf;
  return p;
}

EffortPolicy EffortPolicy::other_type() {
  EffortPolicy p;
  p.kind = Kind::OtherType;
  p.label = "other type's effort";
  return p;
}

EffortPolicy EffortPolicy::region_override(std::map<RegionKind, double> m, std::string label) {
  EffortPolicy p;
  p.kind = Kind::ByRegion;
  p.by_region = std::move(m);
  p.label = std::move(label);
  return p;
}

EffortPolicy EffortPolicy::from_table(EffortTable t, std::string label) {
  EffortPolicy p;
  p.kind = Kind::Table;
  p.table = std::move(t);
  p.label = std::move(label);
  return p;
}

double EffortPolicy::effort(const Region& region, SenderType t, double l) const {
  auto own = [&](SenderType s) {
    const EffortPair e = region.efforts(l);
    return s == SenderType::Good ? e.good : e.bad;
  };
  switch (kind) {
    case Kind::Profile: return own(t);
    case Kind::Constant: return constant;
    case Kind::OtherType: return own(t == SenderType::Good ? SenderType::Bad : SenderType::Good);
    case Kind::ByRegion: {
      const auto it = by_region.find(region.kind);
      return it == by_region.end() ? own(t) : it->second;
    }
    case Kind::Table: return table.at(l);
  }
  return 0.0;
}

bool EffortPolicy::flat_on(const Region& region, SenderType t) const {
  const bool profile_flat = region.kind != RegionKind::Switched;
  switch (kind) {
    case Kind::Profile: return profile_flat || t == SenderType::Good;
    case Kind::Constant: return true;
    case Kind::OtherType: return profile_flat || t == SenderType::Bad;
    case Kind::ByRegion:
      return by_region.count(region.kind) > 0 || profile_flat || t == SenderType::Good;
    case Kind::Table: return false;
  }
  return false;
}

void EffortPolicy::validate() const {
  if (kind == Kind::Constant) check_effort(constant, "deviation effort");
  for (const auto& [k, e] : by_region) check_effort(e, "deviation effort");
  for (double e : table.e) check_effort(e, "deviation effort");
  if (kind == Kind::Table && table.empty()) throw std::invalid_argument("empty deviation table");
}

struct Simulator::State {
  double t = 0.0;
  double l = 0.0;
  std::size_t idx = 0;
  bool stasis = false;
  std::size_t below = 0;
  std::size_t above = 0;
  double w = 1.0;
};

Simulator::Simulator(StrategyProfile profile, Game game, SimOptions opt)
    : profile_(std::move(profile)), game_(std::move(game)), opt_(opt) {
  game_.validate();
  if (!(opt_.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(opt_.rk_step > 0.0)) throw std::invalid_argument("rk_step must be positive");
  majorant_ = game_.params.lambda + game_.params.max_baseline();
}

template <class RngT>
SimPath Simulator::simulate(double l0, SenderType type, std::uint64_t seed, RngT& rng,
                            const EffortPolicy& policy) const {
  const ModelParams& p = game_.params;
  const BenefitFn& beta = game_.benefit;
  const CostFn& cost = game_.cost(type);
  const auto& rs = profile_.regions();
  const double r = p.r;
  const double T = opt_.horizon;
  const double d_own = p.baseline(type);
  const double sat_hi = beta.k + beta.saturation_width();
  const double sat_lo = beta.k - beta.saturation_width();
  constexpr bool jumps = !std::is_same_v<RngT, std::nullptr_t>;

  SimPath path;
  path.seed = seed;
  path.type = type;
  path.horizon = T;

  State s;
  s.l = l0;
  s.idx = profile_.region_index(l0);

  auto market = [&](std::size_t i, double l) { return rs[i].efforts(l); };
  auto drift_in = [&](std::size_t i, double l) {
    const EffortPair e = market(i, l);
    return drift(e.good, e.bad, p);
  };
  auto own_effort = [&](std::size_t i, double l) { return policy.effort(rs[i], type, l); };
  auto own_rate = [&](std::size_t i, double l) {
    return p.lambda * (1.0 - own_effort(i, l)) + d_own;
  };
  auto sample = [&] {
    if (opt_.record_samples) path.samples.emplace_back(s.t, s.l);
  };
  auto finish_flat = [&](double flow) {
    path.payoff += flow * discount(r, s.t, T);
    s.t = T;
  };

  double t_next = kInf;
  auto draw_next = [&] {
    if constexpr (jumps) t_next = s.t + rng.exponential(majorant_);
  };
  draw_next();
  sample();

  // Moving across a boundary at s.l in direction dir.
  auto arrive = [&](int dir, double v) {
    if (dir > 0) {
      const std::size_t n = s.idx + 1;
      const double vn = drift_in(n, s.l);
      if (vn >= 0.0) {
        s.idx = n;
      } else {
        s.stasis = true;
        s.below = s.idx;
        s.above = n;
        s.w = vn / (vn - v);
      }
    } else {
      const std::size_t q = s.idx - 1;
      const double vq = drift_in(q, s.l);
      if (vq <= 0.0) {
        s.idx = q;
      } else {
        s.stasis = true;
        s.below = q;
        s.above = s.idx;
        s.w = v / (v - vq);
      }
    }
    sample();
  };

  auto land = [&](double j) {
    s.l = j;
    s.stasis = false;
    s.idx = profile_.region_index(j);
    path.event_times.push_back(s.t);
    sample();
  };

  // Own flow integrand along l(s) = l_start + v (s - t0).
  auto segment = [&](double t0, double t1, double l_start, double v, bool flat_cost) {
    if (t1 <= t0) return 0.0;
    const double c_flat = flat_cost ? cost(own_effort(s.idx, l_start)) : 0.0;
    double total = flat_cost ? -c_flat * discount(r, t0, t1) : 0.0;
    auto beta_part = [&](double a, double b) {
      const double la = l_start + v * (a - t0);
      const double lb = l_start + v * (b - t0);
      if (v == 0.0) return beta(la) * discount(r, a, b);
      if (std::min(la, lb) >= sat_hi) return beta.max() * discount(r, a, b);
      if (std::max(la, lb) <= sat_lo) return beta.min() * discount(r, a, b);
      const double step = std::min(1.0 / std::abs(v), 1.0 / r);
      return detail::composite_gauss_legendre(
          [&](double u) { return std::exp(-r * u) * beta(l_start + v * (u - t0)); }, a, b, step);
    };
    if (v != 0.0) {
      // split at the saturation points so the quadrature only sees the logistic part
      std::vector<double> cuts{t0, t1};
      for (double z : {sat_lo, sat_hi}) {
        const double tc = t0 + (z - l_start) / v;
        if (tc > t0 && tc < t1) cuts.push_back(tc);
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += beta_part(cuts[k], cuts[k + 1]);
    } else {
      total += beta_part(t0, t1);
    }
    if (!flat_cost) {
      const double step = std::min(v == 0.0 ? kInf : 1.0 / std::abs(v), 1.0 / r);
      total -= detail::composite_gauss_legendre(
          [&](double u) { return std::exp(-r * u) * cost(own_effort(s.idx, l_start + v * (u - t0))); },
          t0, t1, std::isfinite(step) ? step : t1 - t0);
    }
    return total;
  };

  while (s.t < T) {
    if (!std::isfinite(s.l)) {
      finish_flat(beta(LogOdds(s.l)) - cost(own_effort(s.idx, s.l)));
      break;
    }

    if (s.stasis) {
      const EffortPair mb = market(s.below, s.l);
      const EffortPair ma = market(s.above, s.l);
      const double rb = own_rate(s.below, s.l);
      const double ra = own_rate(s.above, s.l);
      const double rate = s.w * rb + (1.0 - s.w) * ra;
      const double flow = beta(s.l) - (s.w * cost(own_effort(s.below, s.l)) +
                                       (1.0 - s.w) * cost(own_effort(s.above, s.l)));
      const double jb = jump_target(s.l, mb.good, mb.bad, p);
      const double ja = jump_target(s.l, ma.good, ma.bad, p);
      if (opt_.exit_absorbing && (rate == 0.0 || (jb == s.l && ja == s.l))) {
        finish_flat(flow);
        break;
      }
      const double tend = std::min(t_next, T);
      path.payoff += flow * discount(r, s.t, tend);
      s.t = tend;
      if (tend >= T) break;
      if constexpr (jumps) {
        ++path.proposals;
        const double u = rng.uniform();
        if (u * majorant_ < rate) {
          ++path.accepted;
          const bool left = rng.uniform() * rate < s.w * rb;
          land(left ? jb : ja);
        }
        draw_next();
      }
      continue;
    }

    const Region& R = rs[s.idx];
    if (R.kind != RegionKind::Switched) {
      const double v = drift_in(s.idx, s.l);
      const bool flat = policy.flat_on(R, type);
      const double rate_here = own_rate(s.idx, s.l);
      double tb = kInf;
      double bound = 0.0;
      if (v > 0.0) bound = R.upper.value();
      if (v < 0.0) bound = R.lower.value();
      if (v != 0.0 && std::isfinite(bound)) tb = std::max(0.0, (bound - s.l) / v);
      if (opt_.exit_absorbing && flat) {
        const EffortPair m = market(s.idx, s.l);
        if (v == 0.0 && (rate_here == 0.0 || jump_target(s.l, m.good, m.bad, p) == s.l)) {
          finish_flat(beta(s.l) - cost(own_effort(s.idx, s.l)));
          break;
        }
        const bool saturated = (v > 0.0 && s.l >= sat_hi) || (v < 0.0 && s.l <= sat_lo);
        if (v != 0.0 && !std::isfinite(tb) && rate_here == 0.0 && saturated) {
          finish_flat((v > 0.0 ? beta.max() : beta.min()) - cost(own_effort(s.idx, s.l)));
          s.l += v * (T - s.t);
          break;
        }
      }
      const double t_bound = s.t + tb;
      const double tend = std::min({t_next, t_bound, T});
      path.payoff += segment(s.t, tend, s.l, v, flat);
      const bool hit = tend == t_bound && t_bound <= t_next && t_bound <= T;
      s.l = hit ? bound : s.l + v * (tend - s.t);
      s.t = tend;
      if (hit) {
        arrive(v > 0.0 ? 1 : -1, v);
        continue;
      }
      if (tend >= T) break;
    } else {
      // l-dependent drift: RK4 on (l, payoff) with the boundary located by bisection
      const double lo = R.lower.value();
      const double hi = R.upper.value();
      auto rhs_l = [&](double l) { return drift_in(s.idx, l); };
      auto rhs_p = [&](double u, double l) {
        return std::exp(-r * u) * (beta(l) - cost(own_effort(s.idx, l)));
      };
      auto step = [&](double t0, double l, double h, double& dp) {
        const double k1 = rhs_l(l);
        const double q1 = rhs_p(t0, l);
        const double k2 = rhs_l(l + 0.5 * h * k1);
        const double q2 = rhs_p(t0 + 0.5 * h, l + 0.5 * h * k1);
        const double k3 = rhs_l(l + 0.5 * h * k2);
        const double q3 = rhs_p(t0 + 0.5 * h, l + 0.5 * h * k2);
        const double k4 = rhs_l(l + h * k3);
        const double q4 = rhs_p(t0 + h, l + h * k3);
        dp = h * (q1 + 2.0 * q2 + 2.0 * q3 + q4) / 6.0;
        return l + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      };
      const double tend = std::min(t_next, T);
      bool hit = false;
      int dir = 0;
      double v_at = 0.0;
      while (s.t < tend) {
        const double h = std::min(opt_.rk_step, tend - s.t);
        double dp = 0.0;
        const double ln = step(s.t, s.l, h, dp);
        const bool out_lo = ln <= lo;
        const bool out_hi = ln >= hi;
        if (!out_lo && !out_hi) {
          s.l = ln;
          path.payoff += dp;
          s.t = s.t + h;
          if (rhs_l(s.l) == 0.0) {
            // fixed point of the flow inside the region
            break;
          }
          continue;
        }
        const double target = out_lo ? lo : hi;
        double a = 0.0;
        double b = h;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          double tmp = 0.0;
          const double lm = step(s.t, s.l, m, tmp);
          const bool beyond = out_lo ? lm <= lo : lm >= hi;
          (beyond ? b : a) = m;
        }
        step(s.t, s.l, b, dp);
        path.payoff += dp;
        s.t += b;
        s.l = target;
        hit = true;
        dir = out_lo ? -1 : 1;
        v_at = rhs_l(target);
        break;
      }
      if (hit) {
        arrive(dir, v_at);
        continue;
      }
      if (s.t < tend && rhs_l(s.l) == 0.0) {
        const double flow = beta(s.l) - cost(own_effort(s.idx, s.l));
        path.payoff += flow * discount(r, s.t, tend);
        s.t = tend;
      }
      if (s.t >= T) break;
    }

    if constexpr (jumps) {
      ++path.proposals;
      const double u = rng.uniform();
      const double rate = own_rate(s.idx, s.l);
      if (u * majorant_ < rate) {
        ++path.accepted;
        const EffortPair m = market(s.idx, s.l);
        land(jump_target(s.l, m.good, m.bad, p));
      }
      draw_next();
    }
  }

  s.t = T;
  path.terminal_l = s.l;
  const double beta_T = std::isfinite(s.l) ? beta(s.l) : beta(LogOdds(s.l));
  path.tail_bound = std::exp(-r * T) * beta_T / r;
  sample();
  return path;
}

SimPath Simulator::run(double l0, SenderType t, std::uint64_t seed, const EffortPolicy& policy) const {
  Rng rng(seed);
  return simulate(l0, t, seed, rng, policy);
}

SimPath Simulator::run_mixture(double l0, std::uint64_t seed, const EffortPolicy& policy) const {
  Rng rng(seed);
  const SenderType t = rng.uniform() < belief_of(l0) ? SenderType::Good : SenderType::Bad;
  return simulate(l0, t, seed, rng, policy);
}

double Simulator::flow(double l0, double dt) const {
  if (dt < 0.0) throw std::invalid_argument("flow needs dt >= 0");
  if (dt == 0.0) return l0;
  Simulator copy(*this);
  copy.opt_.horizon = dt;
  copy.opt_.record_samples = false;
  copy.opt_.exit_absorbing = false;
  std::nullptr_t none = nullptr;
  return copy.simulate(l0, SenderType::Good, 0, none, EffortPolicy::profile()).terminal_l;
}

double flow_deterministic(double l0, const StrategyProfile& profile, const ModelParams& params,
                          double dt) {
  if (dt < 0.0) throw std::invalid_argument("flow needs dt >= 0");
  if (dt == 0.0) return l0;
  Game g{params, BenefitFn::shifted_logistic(0.0), CostFn{1.0, 0.0}, CostFn{2.0, 0.0}};
  SimOptions opt;
  opt.horizon = dt;
  return Simulator(profile, g, opt).flow(l0, dt);
}

SimPath simulate_path(double l0, const StrategyProfile& profile, const Game& game, SenderType t,
                      double horizon, std::uint64_t seed, const std::optional<EffortPolicy>& deviation) {
  SimOptions opt;
  opt.horizon = horizon;
  Simulator sim(profile, game, opt);
  return sim.run(l0, t, seed, deviation ? *deviation : EffortPolicy::profile());
}

namespace {

EnsembleSummary summarize_values(const std::vector<double>& payoff, const std::vector<double>& terminal,
                                 const std::vector<char>& good) {
  EnsembleSummary s;
  s.n = payoff.size();
  s.histogram_edges.resize(41);
  for (int i = 0; i <= 40; ++i) s.histogram_edges[i] = -20.0 + i;
  s.histogram.assign(40, 0);
  double mp = 0.0, m2p = 0.0, mb = 0.0, m2b = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double k = static_cast<double>(i + 1);
    const double dp = payoff[i] - mp;
    mp += dp / k;
    m2p += dp * (payoff[i] - mp);
    const double mu = belief_of(terminal[i]);
    const double db = mu - mb;
    mb += db / k;
    m2b += db * (mu - mb);
    if (good[i]) ++s.n_good;
    const double x = terminal[i];
    std::size_t bin = 0;
    if (x >= 20.0) bin = 39;
    else if (x > -20.0) bin = std::min<std::size_t>(39, static_cast<std::size_t>(std::floor(x + 20.0)));
    ++s.histogram[bin];
  }
  s.mean_payoff = mp;
  s.mean_terminal_belief = mb;
  if (s.n > 1) {
    s.var_payoff = m2p / static_cast<double>(s.n - 1);
    s.var_terminal_belief = m2b / static_cast<double>(s.n - 1);
  }
  return s;
}

}  // namespace

EnsembleSummary summarize(const std::vector<SimPath>& paths) {
  std::vector<double> payoff, terminal;
  std::vector<char> good;
  for (const auto& p : paths) {
    payoff.push_back(p.payoff);
    terminal.push_back(p.terminal_l);
    good.push_back(p.type == SenderType::Good);
  }
  return summarize_values(payoff, terminal, good);
}

PathEnsemble ensemble(const Simulator& sim, double l0, std::optional<SenderType> type,
                      std::size_t n_paths, std::uint64_t base_seed, bool keep_paths) {
  if (n_paths < 1) throw std::invalid_argument("ensemble needs at least one path");
  PathEnsemble out;
  std::vector<double> payoff(n_paths), terminal(n_paths);
  std::vector<char> good(n_paths);
  if (keep_paths) out.paths.resize(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(base_seed, i);
    SimPath path = type ? sim.run(l0, *type, seed) : sim.run_mixture(l0, seed);
    payoff[i] = path.payoff;
    terminal[i] = path.terminal_l;
    good[i] = path.type == SenderType::Good;
    if (keep_paths) out.paths[i] = std::move(path);
  });
  out.summary = summarize_values(payoff, terminal, good);
  return out;
}

}  // namespace signalflow
