#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signalflow/model.hpp"
#include "signalflow/strategy.hpp"
#include "signalflow/values.hpp"

namespace signalflow {

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict v);

struct ConditionRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // positive means slack
  bool strict = false;
  bool pass = false;
  std::string note;
};

struct RegionExtrema {
  double sup_switched_good = 0.0;
  double inf_switched_good = 0.0;
  double sup_switched_bad = 0.0;
  double inf_switched_bad = 0.0;
  double sup_scrutiny_good = 0.0;
  double inf_scrutiny_good = 0.0;
  double sup_scrutiny_bad = 0.0;
  double inf_scrutiny_bad = 0.0;
};

struct EquilibriumReport {
  std::string proposition;
  std::vector<ConditionRecord> conditions;
  std::optional<RegionExtrema> extrema;
  std::optional<double> n_star;
  std::optional<double> width_bound;
  Verdict verdict = Verdict::NotApplicable;
  std::vector<std::string> notes;

  double min_margin() const;
  const ConditionRecord* find(const std::string& name) const;
};

struct Tolerances {
  double grace = 1e-12;   // weak conditions pass at margin >= -grace
  double strict = 0.0;    // strict conditions pass at margin > strict
};

enum class BestResponse { Zero, One, Interior };
const char* to_string(BestResponse b);

BestResponse corner_best_response(const ValueFunction& vf, double l, SenderType t);

EquilibriumReport check_prop1(const ValueFunction& vf, const Tolerances& tol = {});
// Report for a failed construction: names the condition that broke the solve.
EquilibriumReport check_solution(const SwitchedSolution& s, const Tolerances& tol = {});

EquilibriumReport check_prop2_primitives(double l_under, double l_1, const Game& g,
                                         const Tolerances& tol = {});
EquilibriumReport check_prop3_primitives(double l_under, double l_1, double l_over, const Game& g,
                                         const Tolerances& tol = {});

struct DthetaSweepPoint {
  double delta = 0.0;
  bool pass = false;
  double min_margin = 0.0;
};

struct DthetaReport {
  EquilibriumReport symmetric;   // primitive conditions at d_G = d_B = d, strict margins
  EquilibriumReport perturbed;   // full check at the requested d_G, d_B
  std::optional<StasisValues> stasis;
  std::vector<DthetaSweepPoint> sweep;
  std::optional<double> largest_passing_delta;
  Verdict verdict = Verdict::NotApplicable;
};

DthetaReport check_dtheta(const Thresholds& t, const Game& g, const std::vector<double>& deltas,
                          const ValueOptions& opt = {});

struct ScrutinyBounds {
  bool applicable = false;
  double n_star = 0.0;
  double jump_length = 0.0;
  double width_bound = 0.0;
};

ScrutinyBounds scrutiny_bounds(const Game& g);

struct BestResponseCheck {
  double max_violation = 0.0;
  double at = 0.0;
  SenderType type = SenderType::Good;
  std::size_t points = 0;
  bool equilibrium = true;
};

std::vector<double> verification_grid(const ValueFunction& vf);
BestResponseCheck best_response_verify(const ValueFunction& vf, const std::vector<double>& grid,
                                       double tolerance = 1e-8);
BestResponseCheck best_response_verify(const ValueFunction& vf, double tolerance = 1e-8);

struct ThresholdRange {
  double lo = 0.0;
  double hi = 0.0;
  bool fixed() const { return lo == hi; }
  static ThresholdRange at(double x) { return {x, x}; }
};

struct SearchSpec {
  ThresholdRange l_under;
  ThresholdRange l_0;
  ThresholdRange l_1;
  ThresholdRange l_over;
  int grid_points = 21;
  int refine_rounds = 2;
  int refine_halvings = 6;
};

struct SearchResult {
  bool found = false;
  Thresholds best;
  EquilibriumReport report;
  SwitchedSolution solution;
  std::vector<Thresholds> passing;
  std::size_t evaluated = 0;
};

SearchResult find_equilibrium(const Game& g, const SearchSpec& spec, const ValueOptions& opt = {},
                              const Tolerances& tol = {});

}  // namespace signalflow
