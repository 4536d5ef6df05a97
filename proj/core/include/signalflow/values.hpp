#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signalflow/model.hpp"
#include "signalflow/strategy.hpp"

namespace signalflow {

struct ValueOptions {
  double curve_step = 1.0 / 128.0;
  int switched_steps = 2000;
  double boundary_offset = 1e-9;
  double foc_tolerance = 1e-13;
  int max_stasis_iterations = 200;
  double stasis_tolerance = 1e-13;
};

double pooling_value(LogOdds l, const ModelParams& p, const BenefitFn& beta);

// Linear HJB on a region where the market's efforts are constant:
//   r V = f + v V' + rho (V(z + shift) - V)
// with the jump landing outside the region. v != 0; the value is pinned at
// the boundary the drift points to.
struct LinearRegionSpec {
  double lower = 0.0;
  double upper = 0.0;
  double v = 0.0;
  double rho = 0.0;
  double flow_cost = 0.0;
  double shift = 0.0;
  double boundary_value = 0.0;  // unused when that boundary is infinite
};

class RegionCurve {
 public:
  using Landing = std::function<double(double)>;

  RegionCurve(const BenefitFn& beta, double r, const LinearRegionSpec& spec, Landing landing,
              double step);

  double operator()(double l) const;
  double derivative(double l) const;
  double source(double z) const;
  double rate() const { return a_; }
  // Value at the boundary the drift points to (limit for an infinite boundary).
  double target_limit() const { return target_limit_; }
  const LinearRegionSpec& spec() const { return spec_; }
  const std::vector<double>& nodes() const { return z_; }
  const std::vector<double>& values() const { return val_; }
  // Direct quadrature of the integral representation at one point.
  double integrate_at(double l) const;

 private:
  BenefitFn beta_;
  double r_ = 0.0;
  LinearRegionSpec spec_;
  Landing landing_;
  double a_ = 0.0;
  double inv_speed_ = 0.0;
  double target_limit_ = 0.0;
  double sat_ = 0.0;  // beyond this the source is constant (infinite side only)
  std::vector<double> z_;
  std::vector<double> val_;
  std::vector<double> der_;
};

struct StasisValues {
  double good = 0.0;
  double bad = 0.0;
  double w = 1.0;
  double lambda_bad = 0.0;
  double e_plus = 0.0;
  double j_minus = 0.0;
  double j_plus = 0.0;
};

// Switched-region solution on (l_under, l_0].
struct ValueTable {
  std::vector<double> grid;
  std::vector<double> good;
  std::vector<double> bad;
  std::vector<double> bad_effort;
  std::vector<double> jump;
  double good_at_under = 0.0;
  double bad_at_under = 0.0;
  std::optional<StasisValues> stasis;

  bool empty() const { return grid.empty(); }
};

class ValueFunction {
 public:
  ValueFunction(StrategyProfile profile, Game game, const ValueOptions& opt = {});

  void attach(ValueTable table);

  double operator()(SenderType t, double l) const;
  double operator()(SenderType t, LogOdds l) const { return (*this)(t, l.value()); }
  // Value where the jump from l lands, taking the region of the target.
  double at_jump(SenderType t, double l) const;

  const StrategyProfile& profile() const { return profile_; }
  const Game& game() const { return game_; }
  const ValueOptions& options() const { return opt_; }
  const ValueTable* table() const { return table_ ? &*table_ : nullptr; }
  const RegionCurve* curve(SenderType t, std::size_t region) const;
  bool is_pooling_region(std::size_t region) const;
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  StrategyProfile profile_;
  Game game_;
  ValueOptions opt_;
  std::vector<std::shared_ptr<const RegionCurve>> good_;
  std::vector<std::shared_ptr<const RegionCurve>> bad_;
  std::vector<char> pooled_;
  std::optional<ValueTable> table_;
  std::vector<std::string> notes_;
};

double scrutiny_value(double l, const StrategyProfile& profile, const Game& game, SenderType t);

struct ConstructionFailure {
  std::string condition;
  double at = 0.0;
  std::string message;
};

struct SwitchedSolution {
  std::optional<ConstructionFailure> failure;
  ValueTable table;
  StrategyProfile profile;
  std::shared_ptr<ValueFunction> values;

  bool ok() const { return !failure.has_value(); }
};

SwitchedSolution switched_value_solve(const Thresholds& t, const Game& game,
                                      const ValueOptions& opt = {});

struct EffortSolve {
  bool ok = false;
  double effort = 0.0;
  double jump = 0.0;
  std::string condition;
};

// Bad type's first-order condition at l given V_B(l); the jump is forced into [l_1, inf).
EffortSolve solve_bad_effort(double l, double v_bad, const ValueFunction& vf, const ValueOptions& opt);

StasisValues stasis_values(const ValueFunction& vf, double e_plus);
StasisValues stasis_values(const ValueFunction& solved);

struct ValueBounds {
  double lower = 0.0;
  double upper = 0.0;
};

ValueBounds value_bounds_switched(double l, double l_under, double eps, const ModelParams& p,
                                  const BenefitFn& beta);
ValueBounds value_bounds_switched(double l, double l_under, const EffortTable& bad_effort,
                                  const ModelParams& p, const BenefitFn& beta);

struct ResidualReport {
  double max_abs = 0.0;
  double at = 0.0;
  std::size_t points = 0;
};

ResidualReport hjb_residual(const ValueFunction& vf, SenderType t, double scrutiny_step = 1e-3,
                            double scrutiny_span = 60.0);

}  // namespace signalflow
