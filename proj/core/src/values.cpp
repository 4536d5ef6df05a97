#include "signalflow/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "quadrature.hpp"

namespace signalflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hermite(double x0, double x1, double v0, double v1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * v1 +
         (t3 - t2) * h * d1;
}

double lerp_table(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double t = (at - x[i]) / (x[i + 1] - x[i]);
  return y[i] + t * (y[i + 1] - y[i]);
}

}  // namespace

double pooling_value(LogOdds l, const ModelParams& p, const BenefitFn& beta) {
  return beta(l) / p.r;
}

RegionCurve::RegionCurve(const BenefitFn& beta, double r, const LinearRegionSpec& spec,
                         Landing landing, double step)
    : beta_(beta), r_(r), spec_(spec), landing_(std::move(landing)) {
  if (spec.v == 0.0) throw std::invalid_argument("region curve needs nonzero drift");
  if (!(spec.lower < spec.upper)) throw std::invalid_argument("region curve needs lower < upper");
  inv_speed_ = 1.0 / std::abs(spec.v);
  a_ = (r + spec.rho) * inv_speed_;
  const double reach = std::isfinite(spec.shift) ? std::abs(spec.shift) : 0.0;

  if (spec.v > 0.0) {
    double top = spec.upper;
    double v_top = spec.boundary_value;
    if (!std::isfinite(spec.upper)) {
      sat_ = std::max(spec.lower, beta.k + beta.saturation_width() + reach);
      top = sat_ + step;
      v_top = source(top) / a_;
    }
    const int n = std::max(2, static_cast<int>(std::ceil((top - spec.lower) / step)));
    const double h = (top - spec.lower) / n;
    z_.resize(n + 1);
    val_.resize(n + 1);
    der_.resize(n + 1);
    for (int i = 0; i <= n; ++i) z_[i] = i == n ? top : spec.lower + i * h;
    val_[n] = v_top;
    for (int i = n - 1; i >= 0; --i) {
      const double z0 = z_[i];
      const double panel = detail::gauss_legendre(
          [&](double z) { return source(z) * std::exp(-a_ * (z - z0)); }, z0, z_[i + 1]);
      val_[i] = std::exp(-a_ * (z_[i + 1] - z0)) * val_[i + 1] + panel;
    }
    for (int i = 0; i <= n; ++i) der_[i] = a_ * val_[i] - source(z_[i]);
    target_limit_ = v_top;
  } else {
    double bottom = spec.lower;
    double v_bottom = spec.boundary_value;
    if (!std::isfinite(spec.lower)) {
      sat_ = std::min(spec.upper, beta.k - beta.saturation_width() - reach);
      bottom = sat_ - step;
      v_bottom = source(bottom) / a_;
    }
    const int n = std::max(2, static_cast<int>(std::ceil((spec.upper - bottom) / step)));
    const double h = (spec.upper - bottom) / n;
    z_.resize(n + 1);
    val_.resize(n + 1);
    der_.resize(n + 1);
    for (int i = 0; i <= n; ++i) z_[i] = i == n ? spec.upper : bottom + i * h;
    val_[0] = v_bottom;
    for (int i = 0; i < n; ++i) {
      const double z1 = z_[i + 1];
      const double panel = detail::gauss_legendre(
          [&](double z) { return source(z) * std::exp(-a_ * (z1 - z)); }, z_[i], z1);
      val_[i + 1] = std::exp(-a_ * (z1 - z_[i])) * val_[i] + panel;
    }
    for (int i = 0; i <= n; ++i) der_[i] = source(z_[i]) - a_ * val_[i];
    target_limit_ = v_bottom;
  }
}

double RegionCurve::source(double z) const {
  double g = beta_(z) - spec_.flow_cost;
  if (spec_.rho != 0.0) g += spec_.rho * landing_(z + spec_.shift);
  return g * inv_speed_;
}

double RegionCurve::operator()(double l) const {
  if (std::isnan(l) || l < spec_.lower || l > spec_.upper) {
    std::ostringstream os;
    os << "l = " << l << " outside region [" << spec_.lower << ", " << spec_.upper << "]";
    throw std::domain_error(os.str());
  }
  if (l >= z_.back()) return spec_.v > 0.0 ? val_.back() : val_.back();
  if (l <= z_.front()) return val_.front();
  const double h = (z_.back() - z_.front()) / static_cast<double>(z_.size() - 1);
  std::size_t i = static_cast<std::size_t>((l - z_.front()) / h);
  i = std::min(i, z_.size() - 2);
  while (i > 0 && l < z_[i]) --i;
  while (i + 2 < z_.size() && l > z_[i + 1]) ++i;
  return hermite(z_[i], z_[i + 1], val_[i], val_[i + 1], der_[i], der_[i + 1], l);
}

double RegionCurve::derivative(double l) const {
  const double v = (*this)(l);
  const double g = std::isfinite(l) ? source(l) : 0.0;
  return spec_.v > 0.0 ? a_ * v - g : g - a_ * v;
}

double RegionCurve::integrate_at(double l) const {
  if (l < spec_.lower || l > spec_.upper) throw std::domain_error("l outside region");
  constexpr double width = 0.125;
  if (spec_.v > 0.0) {
    if (std::isfinite(spec_.upper)) {
      const double body = detail::composite_gauss_legendre(
          [&](double z) { return source(z) * std::exp(-a_ * (z - l)); }, l, spec_.upper, width);
      return body + std::exp(-a_ * (spec_.upper - l)) * spec_.boundary_value;
    }
    const double s = std::max(l, sat_);
    const double body = detail::composite_gauss_legendre(
        [&](double z) { return source(z) * std::exp(-a_ * (z - l)); }, l, s, width);
    return body + std::exp(-a_ * (s - l)) * source(s + 1.0) / a_;
  }
  if (std::isfinite(spec_.lower)) {
    const double body = detail::composite_gauss_legendre(
        [&](double z) { return source(z) * std::exp(-a_ * (l - z)); }, spec_.lower, l, width);
    return body + std::exp(-a_ * (l - spec_.lower)) * spec_.boundary_value;
  }
  const double s = std::min(l, sat_);
  const double body = detail::composite_gauss_legendre(
      [&](double z) { return source(z) * std::exp(-a_ * (l - z)); }, s, l, width);
  return body + std::exp(-a_ * (l - s)) * source(s - 1.0) / a_;
}

ValueFunction::ValueFunction(StrategyProfile profile, Game game, const ValueOptions& opt)
    : profile_(std::move(profile)), game_(std::move(game)), opt_(opt) {
  game_.validate();
  const auto& rs = profile_.regions();
  pooled_.assign(rs.size(), 0);
  good_.resize(rs.size());
  bad_.resize(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Region& rg = rs[i];
    if (rg.kind == RegionKind::PoolZero) pooled_[i] = 1;
    if (rg.kind == RegionKind::Custom && rg.custom.good == rg.custom.bad) pooled_[i] = 1;
  }
  if (!game_.params.is_symmetric())
    notes_.push_back("pooling regions valued at beta/r although baseline rates differ");

  const ModelParams& p = game_.params;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Region& rg = rs[i];
    if (pooled_[i] || rg.kind == RegionKind::Switched) continue;
    const EffortPair m = rg.efforts(rg.lower.value());
    const double v = drift(m.good, m.bad, p);
    if (v == 0.0) throw std::invalid_argument("stationary region with unequal efforts is unsupported");
    const double shift = log_rate_ratio(m.good, m.bad, p);

    double boundary = 0.0;
    const LogOdds edge = v > 0.0 ? rg.upper : rg.lower;
    if (edge.is_finite()) {
      const std::size_t nb = profile_.region_index(edge.value());
      if (!pooled_[nb] && nb != i)
        notes_.push_back("boundary of region " + std::to_string(i) + " meets a non-pooling region");
      boundary = game_.pooling_value(edge.value());
    }
    for (SenderType t : {SenderType::Good, SenderType::Bad}) {
      const double own = t == SenderType::Good ? m.good : m.bad;
      LinearRegionSpec spec;
      spec.lower = rg.lower.value();
      spec.upper = rg.upper.value();
      spec.v = v;
      spec.rho = signal_rate(t, own, p);
      spec.flow_cost = game_.cost(t)(own);
      spec.shift = shift;
      spec.boundary_value = boundary;
      const BenefitFn beta = game_.benefit;
      const double r = p.r;
      auto curve = std::make_shared<const RegionCurve>(
          beta, r, spec, [beta, r](double x) { return beta(x) / r; }, opt_.curve_step);
      (t == SenderType::Good ? good_ : bad_)[i] = std::move(curve);
    }
    if (std::isfinite(shift)) {
      const auto& zs = good_[i]->nodes();
      for (std::size_t k = 0; k < zs.size(); k += 16) {
        const double x = zs[k] + shift;
        if (!pooled_[profile_.region_index(x)]) {
          notes_.push_back("jumps from region " + std::to_string(i) +
                           " reach a non-pooling region; pooling value used at the target");
          break;
        }
      }
    }
  }
}

void ValueFunction::attach(ValueTable table) {
  const auto sw = profile_.find_kind(RegionKind::Switched);
  if (sw && !table.empty()) {
    std::vector<Region> rs = profile_.regions();
    rs[*sw].bad_effort = EffortTable{table.grid, table.bad_effort};
    profile_ = StrategyProfile(std::move(rs), profile_.thresholds());
  }
  table_ = std::move(table);
}

const RegionCurve* ValueFunction::curve(SenderType t, std::size_t region) const {
  const auto& v = t == SenderType::Good ? good_ : bad_;
  return region < v.size() ? v[region].get() : nullptr;
}

bool ValueFunction::is_pooling_region(std::size_t region) const { return pooled_.at(region) != 0; }

double ValueFunction::operator()(SenderType t, double l) const {
  if (!std::isfinite(l)) return game_.pooling_value(l);
  if (table_ && table_->stasis && profile_.thresholds() &&
      l == profile_.thresholds()->l_under.value())
    return t == SenderType::Good ? table_->stasis->good : table_->stasis->bad;
  const std::size_t i = profile_.region_index(l);
  if (pooled_[i]) return game_.pooling_value(l);
  if (const RegionCurve* c = curve(t, i)) return (*c)(l);
  if (profile_.regions()[i].kind == RegionKind::Switched) {
    if (!table_ || table_->empty()) throw std::logic_error("switched region values not solved");
    const ValueTable& tb = *table_;
    const auto& ys = t == SenderType::Good ? tb.good : tb.bad;
    if (l <= tb.grid.front()) {
      const double l0 = profile_.regions()[i].lower.value();
      const double v0 = t == SenderType::Good ? tb.good_at_under : tb.bad_at_under;
      const double s = (l - l0) / (tb.grid.front() - l0);
      return v0 + s * (ys.front() - v0);
    }
    return lerp_table(tb.grid, ys, l);
  }
  throw std::logic_error("no value representation for region");
}

double ValueFunction::at_jump(SenderType t, double l) const {
  const EffortPair e = profile_.effort_at(l);
  return (*this)(t, jump_target(l, e.good, e.bad, game_.params));
}

double scrutiny_value(double l, const StrategyProfile& profile, const Game& game, SenderType t) {
  const std::size_t i = profile.region_index(l);
  if (profile.regions()[i].kind != RegionKind::Scrutiny)
    throw std::domain_error("l is not in a scrutiny region");
  ValueFunction vf(profile, game);
  return vf.curve(t, i)->integrate_at(l);
}

namespace {

struct ScrutinyLanding {
  const RegionCurve* curve = nullptr;
  double l_1 = 0.0;
  double l_over = kInf;
  const Game* game = nullptr;

  double operator()(double x) const {
    if (x < l_over) return (*curve)(std::max(x, l_1));
    return game->pooling_value(x);
  }
  double cap() const {
    double c = curve->nodes().back();
    if (std::isfinite(l_over)) c = std::max(c, l_over);
    return std::max(c, game->benefit.k + game->benefit.saturation_width()) + 1.0;
  }
};

ScrutinyLanding landing_for(const ValueFunction& vf, SenderType t) {
  const auto idx = vf.profile().find_kind(RegionKind::Scrutiny);
  if (!idx) throw std::invalid_argument("profile has no scrutiny region");
  const Region& rg = vf.profile().regions()[*idx];
  return ScrutinyLanding{vf.curve(t, *idx), rg.lower.value(), rg.upper.value(), &vf.game()};
}

}  // namespace

EffortSolve solve_bad_effort(double l, double v_bad, const ValueFunction& vf,
                             const ValueOptions& opt) {
  const Game& g = vf.game();
  const ModelParams& p = g.params;
  const ScrutinyLanding land = landing_for(vf, SenderType::Bad);
  EffortSolve out;

  const double a = p.lambda + p.d_good;
  const double j_zero = l + std::log(a / (p.lambda + p.d_bad));
  const double j_one = p.d_bad > 0.0 ? l + std::log(a / p.d_bad) : kInf;
  if (j_one <= land.l_1) {
    out.condition = "(e)";
    return out;
  }
  auto effort = [&](double j) {
    const double e = ((p.lambda + p.d_bad) - a * std::exp(l - j)) / p.lambda;
    return std::clamp(e, 0.0, 1.0);
  };
  auto foc = [&](double j) {
    return p.lambda * (v_bad - land(j)) - g.cost_bad.marginal(effort(j));
  };
  double lo = std::max(land.l_1, j_zero);
  double hi = std::isfinite(j_one) ? j_one : std::max(lo, land.cap());
  if (foc(lo) < 0.0) {
    out.condition = "(e)";
    return out;
  }
  if (foc(hi) > 0.0) {
    out.condition = "(d)";
    return out;
  }
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= opt.foc_tolerance * std::max(1.0, std::abs(lo))) break;
    const double mid = 0.5 * (lo + hi);
    if (foc(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  out.jump = 0.5 * (lo + hi);
  out.effort = effort(out.jump);
  if (out.effort <= 0.0) {
    out.condition = "(e)";
    return out;
  }
  if (out.effort >= 1.0) {
    out.condition = "(d)";
    return out;
  }
  out.ok = true;
  return out;
}

StasisValues stasis_values(const ValueFunction& vf, double e_plus) {
  const Game& g = vf.game();
  const ModelParams& p = g.params;
  const auto& th = vf.profile().thresholds();
  if (!th) throw std::invalid_argument("stasis values need a canonical profile");
  const double lu = th->l_under.value();
  StasisValues s;
  s.e_plus = e_plus;
  s.lambda_bad = p.lambda * (1.0 - e_plus) + p.d_bad;
  s.w = (p.d_good - p.d_bad + p.lambda * e_plus) / (p.lambda * e_plus);
  s.j_minus = lu + std::log((p.lambda + p.d_good) / (p.lambda + p.d_bad));
  s.j_plus = lu + std::log((p.lambda + p.d_good) / s.lambda_bad);
  const double b = g.benefit(lu);
  const double w = s.w;
  if (w == 1.0) {
    s.good = s.bad = g.pooling_value(lu);
    return s;
  }
  const ScrutinyLanding land_g = landing_for(vf, SenderType::Good);
  const ScrutinyLanding land_b = landing_for(vf, SenderType::Bad);
  const double g_minus = g.pooling_value(s.j_minus);
  const double b_minus = g.pooling_value(s.j_minus);
  const double g_plus = land_g(s.j_plus);
  const double b_plus = land_b(s.j_plus);
  const double rate_g = p.lambda + p.d_good;
  s.good = (b + rate_g * (w * g_minus + (1.0 - w) * g_plus)) / (p.r + rate_g);
  const double rate_b_left = p.lambda + p.d_bad;
  s.bad = (b - (1.0 - w) * g.cost_bad(e_plus) + w * rate_b_left * b_minus +
           (1.0 - w) * s.lambda_bad * b_plus) /
          (p.r + w * rate_b_left + (1.0 - w) * s.lambda_bad);
  return s;
}

StasisValues stasis_values(const ValueFunction& solved) {
  const ValueTable* t = solved.table();
  if (!t || t->empty()) throw std::invalid_argument("stasis values need a solved switched region");
  return stasis_values(solved, t->bad_effort.front());
}

SwitchedSolution switched_value_solve(const Thresholds& t, const Game& game,
                                      const ValueOptions& opt) {
  const double lu = t.l_under.value();
  const double l0 = t.l_0.value();
  EffortTable placeholder{{l0}, {1.0}};
  SwitchedSolution out;
  out.profile = StrategyProfile::canonical(t, placeholder);
  auto vf = std::make_shared<ValueFunction>(out.profile, game, opt);
  const ModelParams& p = game.params;

  ValueTable& tb = out.table;
  tb.good_at_under = tb.bad_at_under = game.pooling_value(lu);
  if (!(l0 > lu)) {
    out.values = vf;
    return out;
  }

  const ScrutinyLanding land_g = landing_for(*vf, SenderType::Good);
  const ScrutinyLanding land_b = landing_for(*vf, SenderType::Bad);
  const double l_start = lu + opt.boundary_offset;

  auto fail = [&](std::string cond, double at, std::string msg) {
    out.failure = ConstructionFailure{std::move(cond), at, std::move(msg)};
  };

  double vb = game.pooling_value(lu);
  double vg = vb;
  if (!p.is_symmetric()) {
    if (p.d_good > p.d_bad) {
      fail("(stasis)", lu, "l_under is a stasis point only when d_G <= d_B");
      out.values = vf;
      return out;
    }
    double e_prev = -1.0;
    StasisValues st;
    bool converged = false;
    for (int it = 0; it < opt.max_stasis_iterations; ++it) {
      const EffortSolve s = solve_bad_effort(l_start, vb, *vf, opt);
      if (!s.ok) {
        fail(s.condition, l_start, "no effort at l_under+ lands in scrutiny");
        out.values = vf;
        return out;
      }
      if (p.lambda * s.effort <= p.d_bad - p.d_good) {
        fail("(stasis)", l_start, "switched drift does not point toward l_under");
        out.values = vf;
        return out;
      }
      st = stasis_values(*vf, s.effort);
      vb = st.bad;
      if (std::abs(s.effort - e_prev) < opt.stasis_tolerance) {
        converged = true;
        break;
      }
      e_prev = s.effort;
    }
    if (!converged) {
      fail("(stasis)", lu, "stasis fixed point did not converge");
      out.values = vf;
      return out;
    }
    vg = st.good;
    tb.stasis = st;
    tb.good_at_under = st.good;
    tb.bad_at_under = st.bad;
  }

  struct Deriv {
    double db = 0.0, dg = 0.0;
    EffortSolve s;
  };
  auto rhs = [&](double l, double b, double gv, Deriv& d) -> bool {
    d.s = solve_bad_effort(l, b, *vf, opt);
    if (!d.s.ok) {
      fail(d.s.condition, l,
           d.s.condition == "(d)" ? "bad type would need full effort to stay indifferent"
                                  : "no indifferent effort lands in the scrutiny region");
      return false;
    }
    const double e = d.s.effort;
    const double v = -p.lambda * e + p.d_bad - p.d_good;
    if (!(v < 0.0)) {
      fail("(stasis)", l, "switched drift does not point toward l_under");
      return false;
    }
    const double beta = game.benefit(l);
    const double rate_b = p.lambda * (1.0 - e) + p.d_bad;
    d.db = (p.r * b - beta + game.cost_bad(e) - rate_b * (land_b(d.s.jump) - b)) / v;
    d.dg = (p.r * gv - beta - (p.lambda + p.d_good) * (land_g(d.s.jump) - gv)) / v;
    return true;
  };

  const int n = std::max(1, opt.switched_steps);
  const double h = (l0 - l_start) / n;
  tb.grid.reserve(n + 1);
  double l = l_start;
  for (int i = 0; i <= n; ++i) {
    const double li = i == n ? l0 : l_start + i * h;
    Deriv k1;
    if (!rhs(li, vb, vg, k1)) break;
    tb.grid.push_back(li);
    tb.bad.push_back(vb);
    tb.good.push_back(vg);
    tb.bad_effort.push_back(k1.s.effort);
    tb.jump.push_back(k1.s.jump);
    if (i == n) break;
    const double step = (i + 1 == n ? l0 : l_start + (i + 1) * h) - li;
    Deriv k2, k3, k4;
    if (!rhs(li + 0.5 * step, vb + 0.5 * step * k1.db, vg + 0.5 * step * k1.dg, k2)) break;
    if (!rhs(li + 0.5 * step, vb + 0.5 * step * k2.db, vg + 0.5 * step * k2.dg, k3)) break;
    if (!rhs(li + step, vb + step * k3.db, vg + step * k3.dg, k4)) break;
    vb += step / 6.0 * (k1.db + 2 * k2.db + 2 * k3.db + k4.db);
    vg += step / 6.0 * (k1.dg + 2 * k2.dg + 2 * k3.dg + k4.dg);
    l = li + step;
  }
  (void)l;

  if (out.ok()) {
    vf->attach(tb);
    out.profile = vf->profile();
  }
  out.values = vf;
  return out;
}

ValueBounds value_bounds_switched(double l, double l_under, double eps, const ModelParams& p,
                                  const BenefitFn& beta) {
  if (!(eps > 0.0)) throw std::domain_error("effort lower bound must be > 0");
  const double dist = std::max(0.0, l - l_under);
  const double reach = std::exp(-dist / eps);
  const double disc = std::exp(-dist * (1.0 + p.r / p.lambda) / eps);
  const double base = disc * beta(l_under) / p.r;
  return {base + (1.0 - reach) * beta.min() / p.r, base + (1.0 - reach) * beta.max() / p.r};
}

ValueBounds value_bounds_switched(double l, double l_under, const EffortTable& bad_effort,
                                  const ModelParams& p, const BenefitFn& beta) {
  const double hi = std::max(l_under, l);
  const double inv = detail::composite_gauss_legendre(
      [&](double z) { return 1.0 / bad_effort.at(z); }, l_under, hi, 1e-3);
  const double reach = std::exp(-inv);
  const double disc = std::exp(-inv * (1.0 + p.r / p.lambda));
  const double base = disc * beta(l_under) / p.r;
  return {base + (1.0 - reach) * beta.min() / p.r, base + (1.0 - reach) * beta.max() / p.r};
}

namespace {

double best_jump_term(double lambda, double d, const CostFn& c, double gap) {
  // max over e of (lambda (1-e) + d) gap - c(e)
  double e = 0.0;
  const double slope = -lambda * gap - c.a;
  if (c.b > 0.0) e = std::clamp(slope / (2.0 * c.b), 0.0, 1.0);
  else e = slope > 0.0 ? 1.0 : 0.0;
  return (lambda * (1.0 - e) + d) * gap - c(e);
}

}  // namespace

ResidualReport hjb_residual(const ValueFunction& vf, SenderType t, double scrutiny_step,
                            double scrutiny_span) {
  const Game& g = vf.game();
  const ModelParams& p = g.params;
  const double d_own = p.baseline(t);
  const CostFn& cost = g.cost(t);
  ResidualReport rep;
  auto record = [&](double l, double res) {
    ++rep.points;
    if (std::abs(res) > rep.max_abs) {
      rep.max_abs = std::abs(res);
      rep.at = l;
    }
  };

  const auto& rs = vf.profile().regions();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Region& rg = rs[i];
    if (vf.is_pooling_region(i)) continue;
    if (rg.kind == RegionKind::Switched) {
      const ValueTable* tb = vf.table();
      if (!tb || tb->grid.size() < 5) continue;
      const auto& ys = t == SenderType::Good ? tb->good : tb->bad;
      for (std::size_t k = 2; k + 2 < tb->grid.size(); ++k) {
        const double l = tb->grid[k];
        const double h = 0.25 * (tb->grid[k + 2] - tb->grid[k - 2]);
        const double dv = (-ys[k + 2] + 8.0 * ys[k + 1] - 8.0 * ys[k - 1] + ys[k - 2]) / (12.0 * h);
        const double e = tb->bad_effort[k];
        const double v = drift(0.0, e, p);
        const double gap = vf(t, tb->jump[k]) - ys[k];
        const double res = p.r * ys[k] - g.benefit(l) - v * dv -
                           best_jump_term(p.lambda, d_own, cost, gap);
        record(l, res);
      }
      continue;
    }
    const RegionCurve* c = vf.curve(t, i);
    if (!c) continue;
    const double lo = rg.lower.value();
    const double hi = std::min(rg.upper.value(), lo + scrutiny_span);
    const EffortPair m = rg.efforts(lo);
    const double v = drift(m.good, m.bad, p);
    const double shift = log_rate_ratio(m.good, m.bad, p);
    const auto n = static_cast<long>(std::floor((hi - lo) / scrutiny_step));
    for (long k = 2; k + 2 <= n; ++k) {
      const double l = lo + k * scrutiny_step;
      const double val = (*c)(l);
      const double dv = ((*c)(l + scrutiny_step) - (*c)(l - scrutiny_step)) / (2 * scrutiny_step);
      const double gap = vf(t, std::isfinite(shift) ? l + shift : shift) - val;
      const double res = p.r * val - g.benefit(l) - v * dv -
                         best_jump_term(p.lambda, d_own, cost, gap);
      record(l, res);
    }
  }
  return rep;
}

}  // namespace signalflow
