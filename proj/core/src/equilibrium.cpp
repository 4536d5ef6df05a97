#include "signalflow/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "signalflow/parallel.hpp"

namespace signalflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConditionRecord make_record(std::string name, double lhs, double rhs, bool geq, bool strict,
                            const Tolerances& tol) {
  ConditionRecord c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.strict = strict;
  c.margin = geq ? lhs - rhs : rhs - lhs;
  if (std::isnan(c.margin)) c.margin = lhs == rhs ? 0.0 : -kInf;
  c.pass = strict ? c.margin > tol.strict : c.margin >= -tol.grace;
  return c;
}

void finish(EquilibriumReport& r) {
  r.verdict = Verdict::Pass;
  for (const auto& c : r.conditions)
    if (!c.pass) r.verdict = Verdict::Fail;
}

double clamp_effort(double e, std::vector<std::string>& notes, const char* cond) {
  if (e < 0.0 || e > 1.0) {
    std::ostringstream os;
    os << cond << ": effort argument " << e << " clamped to [0,1]";
    notes.push_back(os.str());
  }
  return std::clamp(e, 0.0, 1.0);
}

double scrutiny_shift(const ModelParams& p) {
  if (p.d_good == 0.0) return -kInf;
  return std::log(p.d_good / (p.lambda + p.d_bad));
}

double shifted(double z, double shift) { return std::isfinite(shift) ? z + shift : shift; }

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(BestResponse b) {
  switch (b) {
    case BestResponse::Zero: return "0";
    case BestResponse::One: return "1";
    case BestResponse::Interior: return "interior";
  }
  return "?";
}

double EquilibriumReport::min_margin() const {
  double m = kInf;
  for (const auto& c : conditions) m = std::min(m, c.margin);
  return m;
}

const ConditionRecord* EquilibriumReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

BestResponse corner_best_response(const ValueFunction& vf, double l, SenderType t) {
  const Game& g = vf.game();
  const double mb = g.params.lambda * (vf(t, l) - vf.at_jump(t, l));
  const CostFn& c = g.cost(t);
  if (mb <= c.marginal(0.0)) return BestResponse::Zero;
  if (mb >= c.marginal(1.0)) return BestResponse::One;
  return BestResponse::Interior;
}

EquilibriumReport check_prop1(const ValueFunction& vf, const Tolerances& tol) {
  EquilibriumReport rep;
  rep.proposition = "prop1";
  const StrategyProfile& prof = vf.profile();
  const auto sw = prof.find_kind(RegionKind::Switched);
  const auto sc = prof.find_kind(RegionKind::Scrutiny);
  const ValueTable* tb = vf.table();
  if (!sw || !sc || !tb || tb->empty() || !prof.thresholds()) {
    rep.verdict = Verdict::NotApplicable;
    rep.notes.push_back("profile has no solved switched region next to a scrutiny region");
    return rep;
  }
  const Game& g = vf.game();
  const ModelParams& p = g.params;
  const Thresholds& th = *prof.thresholds();
  const RegionCurve& cg = *vf.curve(SenderType::Good, *sc);
  const RegionCurve& cb = *vf.curve(SenderType::Bad, *sc);

  RegionExtrema ex;
  auto span = [](const std::vector<double>& v, double extra, double& lo, double& hi) {
    lo = std::min(*std::min_element(v.begin(), v.end()), extra);
    hi = std::max(*std::max_element(v.begin(), v.end()), extra);
  };
  span(tb->good, tb->good_at_under, ex.inf_switched_good, ex.sup_switched_good);
  span(tb->bad, tb->bad_at_under, ex.inf_switched_bad, ex.sup_switched_bad);
  span(cg.values(), cg.target_limit(), ex.inf_scrutiny_good, ex.sup_scrutiny_good);
  span(cb.values(), cb.target_limit(), ex.inf_scrutiny_bad, ex.sup_scrutiny_bad);
  rep.extrema = ex;

  const double shift = scrutiny_shift(p);
  double inf_a = kInf;
  double sup_b = -kInf;
  const auto& zs = cg.nodes();
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double pool = g.pooling_value(shifted(zs[k], shift));
    inf_a = std::min(inf_a, cg.values()[k] - pool);
    sup_b = std::max(sup_b, cb.values()[k] - pool);
  }

  const double lam = p.lambda;
  rep.conditions.push_back(
      make_record("(a)", inf_a, g.cost_good.marginal(1.0) / lam, true, false, tol));
  rep.conditions.push_back(
      make_record("(b)", sup_b, g.cost_bad.marginal(0.0) / lam, false, false, tol));
  rep.conditions.push_back(make_record("(c)", ex.sup_switched_good - ex.inf_scrutiny_good,
                                       g.cost_good.marginal(0.0) / lam, false, false, tol));
  rep.conditions.push_back(make_record("(d)", ex.sup_switched_bad - ex.sup_scrutiny_bad,
                                       g.cost_bad.marginal(1.0) / lam, false, true, tol));
  const double lu = th.l_under.value();
  const double l1 = th.l_1.value();
  const double e_hat = clamp_effort(
      1.0 - p.d_bad / lam - (lam + p.d_good) * std::exp(lu - l1) / lam, rep.notes, "(e)");
  rep.conditions.push_back(make_record("(e)", ex.inf_switched_bad - ex.inf_scrutiny_bad,
                                       g.cost_bad.marginal(e_hat) / lam, true, false, tol));
  const double lo = th.l_over.value();
  double lim_j = std::isfinite(lo) ? shifted(lo, shift) : (std::isfinite(shift) ? kInf : -kInf);
  rep.conditions.push_back(make_record("(f)", lim_j, lu, false, false, tol));
  for (const auto& n : vf.notes()) rep.notes.push_back(n);
  finish(rep);
  return rep;
}

EquilibriumReport check_solution(const SwitchedSolution& s, const Tolerances& tol) {
  if (s.ok()) return check_prop1(*s.values, tol);
  EquilibriumReport rep;
  rep.proposition = "prop1";
  const auto& th = s.profile.thresholds();
  ConditionRecord c;
  c.name = s.failure->condition;
  c.lhs = s.failure->at;
  c.rhs = th ? th->l_0.value() : s.failure->at;
  c.margin = c.lhs - c.rhs;
  c.pass = false;
  c.note = "construction failed: " + s.failure->message;
  rep.conditions.push_back(c);
  rep.notes.push_back(c.note);
  rep.verdict = Verdict::Fail;
  return rep;
}

EquilibriumReport check_prop2_primitives(double l_under, double l_1, const Game& g,
                                         const Tolerances& tol) {
  EquilibriumReport rep;
  rep.proposition = "prop2";
  const ModelParams& p = g.params;
  if (!(l_under < l_1)) {
    rep.verdict = Verdict::NotApplicable;
    rep.notes.push_back("requires l_under < l_1");
    return rep;
  }
  ValueFunction vf(StrategyProfile::extremal(LogOdds(l_1), LogOdds::plus_infinity()), g);
  const std::size_t sc = *vf.profile().find_kind(RegionKind::Scrutiny);
  const double vg1 = vf.curve(SenderType::Good, sc)->integrate_at(l_1);
  const double vb1 = vf.curve(SenderType::Bad, sc)->integrate_at(l_1);
  const double r = p.r;
  const double lam = p.lambda;
  const double bmin = g.benefit.min();
  const double bmax = g.benefit.max();
  const double vb_inf = bmax / (r + lam) + lam * bmin / (r * (r + lam));
  const double top = g.benefit(l_under) / r;

  rep.conditions.push_back(
      make_record("(a)", vg1 - bmin / r, g.cost_good.marginal(1.0) / lam, true, false, tol));
  rep.conditions.push_back(
      make_record("(b)", vb_inf - bmin / r, g.cost_bad.marginal(0.0) / lam, false, false, tol));
  rep.conditions.push_back(
      make_record("(c)", top - vg1, g.cost_good.marginal(0.0) / lam, false, true, tol));
  rep.conditions.push_back(
      make_record("(d)", top - vb_inf, g.cost_bad.marginal(1.0) / lam, false, true, tol));
  const double e_hat = clamp_effort(1.0 - std::exp(l_under - l_1), rep.notes, "(e)");
  rep.conditions.push_back(
      make_record("(e)", top - vb1, g.cost_bad.marginal(e_hat) / lam, true, true, tol));
  rep.conditions.push_back(make_record("(f)", p.d, 0.0, false, false, Tolerances{0.0, 0.0}));
  if (!p.is_symmetric()) rep.notes.push_back("baseline rates differ; primitives use d");
  finish(rep);
  return rep;
}

EquilibriumReport check_prop3_primitives(double l_under, double l_1, double l_over, const Game& g,
                                         const Tolerances& tol) {
  EquilibriumReport rep;
  rep.proposition = "prop3";
  const ModelParams& p = g.params;
  if (!(p.d > 0.0) || !std::isfinite(l_over) || !(l_under < l_1 && l_1 < l_over)) {
    rep.verdict = Verdict::NotApplicable;
    rep.notes.push_back("requires d > 0 and finite l_under < l_1 < l_over");
    return rep;
  }
  Game sym = g;
  sym.params = ModelParams::symmetric(p.lambda, p.d, p.r);
  ValueFunction vf(StrategyProfile::extremal(LogOdds(l_1), LogOdds(l_over)), sym);
  const std::size_t sc = *vf.profile().find_kind(RegionKind::Scrutiny);
  const RegionCurve& cg = *vf.curve(SenderType::Good, sc);
  const RegionCurve& cb = *vf.curve(SenderType::Bad, sc);
  const double lam = p.lambda;
  const double r = p.r;
  const double shift = std::log(p.d / (lam + p.d));
  double min_a = kInf;
  double max_b = -kInf;
  for (std::size_t k = 0; k < cg.nodes().size(); ++k) {
    const double pool = g.benefit(cg.nodes()[k] + shift) / r;
    min_a = std::min(min_a, cg.values()[k] - pool);
    max_b = std::max(max_b, cb.values()[k] - pool);
  }
  const double top = g.benefit(l_under) / r;
  rep.conditions.push_back(
      make_record("(a)", min_a, g.cost_good.marginal(1.0) / lam, true, false, tol));
  rep.conditions.push_back(
      make_record("(b)", max_b, g.cost_bad.marginal(0.0) / lam, false, false, tol));
  rep.conditions.push_back(
      make_record("(c)", top - cg(l_1), g.cost_good.marginal(0.0) / lam, false, true, tol));
  rep.conditions.push_back(make_record("(d)", top - g.benefit(l_over) / r,
                                       g.cost_bad.marginal(1.0) / lam, false, true, tol));
  const double e_hat = clamp_effort(1.0 - p.d / lam - (lam + p.d) * std::exp(l_under - l_1) / lam,
                                    rep.notes, "(e)");
  rep.conditions.push_back(
      make_record("(e)", top - cb(l_1), g.cost_bad.marginal(e_hat) / lam, true, true, tol));
  rep.conditions.push_back(make_record("(f)", l_over + shift, l_under, false, true, tol));
  finish(rep);
  return rep;
}

DthetaReport check_dtheta(const Thresholds& t, const Game& g, const std::vector<double>& deltas,
                          const ValueOptions& opt) {
  DthetaReport out;
  const ModelParams& p = g.params;
  const Tolerances strict{1e-12, 1e-9};
  out.symmetric = check_prop3_primitives(t.l_under.value(), t.l_1.value(), t.l_over.value(), g,
                                         strict);

  const SwitchedSolution sol = switched_value_solve(t, g, opt);
  out.perturbed = check_solution(sol);
  if (sol.ok()) out.stasis = sol.table.stasis;

  for (double delta : deltas) {
    Game gd = g;
    gd.params = ModelParams::type_dependent(p.lambda, p.d, p.d - delta, p.d + delta, p.r);
    DthetaSweepPoint pt;
    pt.delta = delta;
    if (gd.params.d_good < 0.0) {
      pt.pass = false;
      pt.min_margin = -kInf;
    } else {
      const EquilibriumReport rep = check_solution(switched_value_solve(t, gd, opt));
      pt.pass = rep.verdict == Verdict::Pass;
      pt.min_margin = rep.min_margin();
    }
    out.sweep.push_back(pt);
    if (pt.pass && (!out.largest_passing_delta || delta > *out.largest_passing_delta))
      out.largest_passing_delta = delta;
  }

  if (out.symmetric.verdict != Verdict::Pass) {
    out.verdict = Verdict::Fail;
    out.perturbed.notes.push_back("symmetric appendix conditions do not hold strictly");
  } else {
    out.verdict = out.perturbed.verdict;
  }
  return out;
}

ScrutinyBounds scrutiny_bounds(const Game& g) {
  ScrutinyBounds b;
  const ModelParams& p = g.params;
  b.n_star = p.lambda * g.benefit.range() / (p.r * g.cost_good.marginal(1.0));
  if (!(p.d > 0.0)) return b;
  b.applicable = true;
  b.jump_length = std::abs(std::log(p.d / (p.lambda + p.d)));
  b.width_bound = b.n_star * b.jump_length;
  return b;
}

std::vector<double> verification_grid(const ValueFunction& vf) {
  std::vector<double> grid;
  const auto& rs = vf.profile().regions();
  const std::array<double, 7> offsets{0.5, 1, 2, 4, 8, 16, 32};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Region& rg = rs[i];
    const double lo = rg.lower.value();
    const double hi = rg.upper.value();
    if (rg.kind == RegionKind::Switched) {
      if (const ValueTable* tb = vf.table()) grid.insert(grid.end(), tb->grid.begin(), tb->grid.end());
      continue;
    }
    if (const RegionCurve* c = vf.curve(SenderType::Good, i)) {
      for (double z : c->nodes())
        if (rg.contains(z)) grid.push_back(z);
      continue;
    }
    if (std::isfinite(lo) && std::isfinite(hi)) {
      for (int k = 0; k <= 32; ++k) {
        const double z = lo + (hi - lo) * k / 32.0;
        if (rg.contains(z)) grid.push_back(z);
      }
    } else if (std::isfinite(lo) || std::isfinite(hi)) {
      const double edge = std::isfinite(lo) ? lo : hi;
      const double dir = std::isfinite(lo) ? 1.0 : -1.0;
      if (rg.contains(edge)) grid.push_back(edge);
      for (double o : offsets) grid.push_back(edge + dir * o);
    } else if (lo != hi) {
      grid.push_back(0.0);
      for (double o : offsets) {
        grid.push_back(o);
        grid.push_back(-o);
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

BestResponseCheck best_response_verify(const ValueFunction& vf, const std::vector<double>& grid,
                                       double tolerance) {
  BestResponseCheck out;
  const Game& g = vf.game();
  const ModelParams& p = g.params;
  const auto& th = vf.profile().thresholds();
  const bool skip_under = vf.table() && vf.table()->stasis && th;
  for (double l : grid) {
    if (skip_under && l == th->l_under.value()) continue;
    const EffortPair m = vf.profile().effort_at(l);
    const double j = jump_target(l, m.good, m.bad, p);
    for (SenderType t : {SenderType::Good, SenderType::Bad}) {
      const double own = t == SenderType::Good ? m.good : m.bad;
      const double gap = j == l ? 0.0 : vf(t, l) - vf(t, j);
      const double mb = p.lambda * gap;
      const CostFn& c = g.cost(t);
      double v = 0.0;
      if (own == 0.0) v = std::max(0.0, mb - c.marginal(0.0));
      else if (own == 1.0) v = std::max(0.0, c.marginal(1.0) - mb);
      else v = std::abs(mb - c.marginal(own));
      ++out.points;
      if (v > out.max_violation) {
        out.max_violation = v;
        out.at = l;
        out.type = t;
      }
    }
  }
  out.equilibrium = out.max_violation <= tolerance;
  return out;
}

BestResponseCheck best_response_verify(const ValueFunction& vf, double tolerance) {
  return best_response_verify(vf, verification_grid(vf), tolerance);
}

namespace {

struct Score {
  int tier = 0;
  std::vector<double> margins;
};

bool better(const Score& a, const Score& b) {
  if (a.tier != b.tier) return a.tier > b.tier;
  const std::size_t n = std::min(a.margins.size(), b.margins.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a.margins[i] != b.margins[i]) return a.margins[i] > b.margins[i];
  return false;
}

struct Evaluated {
  Thresholds t;
  Score score;
  bool valid = false;
  bool pass = false;
};

Score score_of(const EquilibriumReport& rep, bool solved) {
  Score s;
  for (const auto& c : rep.conditions) s.margins.push_back(c.margin);
  std::sort(s.margins.begin(), s.margins.end());
  s.tier = !solved ? 0 : (rep.verdict == Verdict::Pass ? 2 : 1);
  return s;
}

bool ordered(const Thresholds& t) {
  return t.l_under < t.l_0 && t.l_0 < t.l_1 && t.l_1 < t.l_over && t.l_under.is_finite() &&
         t.l_1.is_finite();
}

}  // namespace

SearchResult find_equilibrium(const Game& g, const SearchSpec& spec, const ValueOptions& opt,
                              const Tolerances& tol) {
  SearchResult out;
  const std::array<const ThresholdRange*, 4> ranges{&spec.l_under, &spec.l_0, &spec.l_1,
                                                    &spec.l_over};
  auto axis = [&](const ThresholdRange& r) {
    std::vector<double> xs;
    if (r.fixed()) return std::vector<double>{r.lo};
    const int n = std::max(2, spec.grid_points);
    for (int i = 0; i < n; ++i) xs.push_back(r.lo + (r.hi - r.lo) * i / (n - 1));
    return xs;
  };
  std::array<std::vector<double>, 4> axes;
  for (int k = 0; k < 4; ++k) axes[k] = axis(*ranges[k]);

  std::vector<Thresholds> cands;
  for (double a : axes[0])
    for (double b : axes[1])
      for (double c : axes[2])
        for (double d : axes[3]) {
          Thresholds t{LogOdds(a), LogOdds(b), LogOdds(c), LogOdds(d)};
          if (ordered(t)) cands.push_back(t);
        }

  auto evaluate = [&](const Thresholds& t) {
    Evaluated e;
    e.t = t;
    if (!ordered(t)) return e;
    const SwitchedSolution s = switched_value_solve(t, g, opt);
    const EquilibriumReport rep = check_solution(s, tol);
    e.valid = true;
    e.score = score_of(rep, s.ok());
    e.pass = rep.verdict == Verdict::Pass;
    return e;
  };

  std::vector<Evaluated> results(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) { results[i] = evaluate(cands[i]); });
  out.evaluated = results.size();

  std::optional<Evaluated> best;
  auto consider = [&](const Evaluated& e) {
    if (!e.valid) return;
    if (e.pass) out.passing.push_back(e.t);
    if (!best || better(e.score, best->score)) best = e;
  };
  for (const auto& e : results) consider(e);

  if (best) {
    for (int round = 0; round < spec.refine_rounds; ++round) {
      for (int k = 0; k < 4; ++k) {
        const ThresholdRange& r = *ranges[k];
        if (r.fixed()) continue;
        double step = (r.hi - r.lo) / std::max(1, spec.grid_points - 1);
        for (int h = 0; h < spec.refine_halvings; ++h) {
          step *= 0.5;
          std::array<Evaluated, 2> trial;
          std::array<Thresholds, 2> ts{best->t, best->t};
          LogOdds* fields[2][4] = {{&ts[0].l_under, &ts[0].l_0, &ts[0].l_1, &ts[0].l_over},
                                   {&ts[1].l_under, &ts[1].l_0, &ts[1].l_1, &ts[1].l_over}};
          const double x = fields[0][k]->value();
          *fields[0][k] = LogOdds(std::clamp(x - step, r.lo, r.hi));
          *fields[1][k] = LogOdds(std::clamp(x + step, r.lo, r.hi));
          parallel_for(2, [&](std::size_t i) { trial[i] = evaluate(ts[i]); });
          out.evaluated += 2;
          for (const auto& e : trial) consider(e);
        }
      }
    }
  }

  if (!best) {
    out.report.proposition = "prop1";
    out.report.verdict = Verdict::Fail;
    out.report.notes.push_back("no admissible threshold ordering in the search space");
    return out;
  }
  out.best = best->t;
  out.solution = switched_value_solve(best->t, g, opt);
  out.report = check_solution(out.solution, tol);
  out.found = out.report.verdict == Verdict::Pass;
  if (!out.found) out.report.notes.push_back("no candidate passed; least-violated candidate returned");
  return out;
}

}  // namespace signalflow
