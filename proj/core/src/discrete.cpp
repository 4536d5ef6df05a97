#include "signalflow/discrete.hpp"

#include <cmath>
#include <stdexcept>

#include "signalflow/parallel.hpp"

namespace signalflow {

namespace {

constexpr double kBetaMin = 0.0;
constexpr double kBetaMax = 1.0;

Inequality geq(double lhs, double rhs, double tol) {
  return {lhs, rhs, lhs - rhs, lhs - rhs >= -tol};
}

// market belief after the pooled first-period action
double pooled_benefit(const DiscreteParams& p, double q) {
  const double x = q * std::exp(p.l0);
  return x / (1.0 + x);
}

double indifference_lhs(const DiscreteParams& p, double q, double e0) {
  return pooled_benefit(p, q) / (1.0 - p.delta) - p.cost_good * e0;
}

double indifference_rhs(const DiscreteParams& p, double e1) {
  return kBetaMax + p.delta / (1.0 - p.delta) * (kBetaMax - p.cost_good * e1);
}

}  // namespace

void DiscreteParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (!(cost_good > 0.0)) throw std::invalid_argument("cost_good must be positive");
  if (!(cost_bad > cost_good)) throw std::invalid_argument("cost_bad must exceed cost_good");
  if (!std::isfinite(l0)) throw std::invalid_argument("l0 must be finite");
}

bool DiscreteReport::inequalities_pass() const {
  return scrutiny_good.pass && scrutiny_bad.pass && bad_first_period.pass;
}

bool DiscreteReport::pass(double residual_tolerance) const {
  return !separating && inequalities_pass() &&
         std::abs(good_indifference_residual) < residual_tolerance;
}

DiscreteReport check_discrete(const DiscreteParams& p, const DiscreteCandidate& c, double tolerance) {
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (c.e0 < 0.0 || c.e1 < 0.0) throw std::invalid_argument("efforts must be nonnegative");
  if (!(c.q_good >= 0.0 && c.q_good <= 1.0)) throw std::invalid_argument("q_G must lie in [0,1]");
  DiscreteReport r;
  r.scrutiny_good = geq(kBetaMax - p.cost_good * c.e1, kBetaMin, tolerance);
  r.scrutiny_bad = geq(kBetaMin, kBetaMax - p.cost_bad * c.e1, tolerance);
  r.bad_first_period =
      geq(pooled_benefit(p, c.q_good) / (1.0 - p.delta) - p.cost_bad * c.e0,
          kBetaMax + p.delta / (1.0 - p.delta) * kBetaMin, tolerance);
  r.indifference_lhs = indifference_lhs(p, c.q_good, c.e0);
  r.indifference_rhs = indifference_rhs(p, c.e1);
  r.good_indifference_residual = r.indifference_lhs - r.indifference_rhs;
  if (c.q_good == 0.0 || c.q_good == 1.0) {
    r.separating = true;
    r.notes.push_back("q_G at 0 or 1 separates the types; switched efforts cannot support it");
  }
  return r;
}

std::optional<double> solve_q(const DiscreteParams& p, double e0, double e1) {
  const double rhs = indifference_rhs(p, e1);
  auto f = [&](double q) { return indifference_lhs(p, q, e0) - rhs; };
  double lo = 0.0;
  double hi = 1.0;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) return std::nullopt;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

std::vector<DiscreteSolution> search_discrete(const DiscreteParams& p, const DiscreteGrid& grid) {
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (grid.divisions < 1) throw std::invalid_argument("grid needs at least one division");
  std::vector<DiscreteSolution> out;
  if (!(p.cost_bad > p.cost_good)) return out;
  const int n = grid.divisions;
  std::vector<std::optional<DiscreteSolution>> cells(static_cast<std::size_t>(n) * n);
  parallel_for(cells.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) / n + 1;
    const int j = static_cast<int>(k) % n + 1;
    const double e0 = grid.e0_max * i / n;
    const double e1 = grid.e1_max * j / n;
    const auto q = solve_q(p, e0, e1);
    if (!q) return;
    DiscreteSolution s{{e0, *q, e1}, check_discrete(p, {e0, *q, e1})};
    if (s.report.pass()) cells[k] = s;
  });
  for (auto& c : cells)
    if (c) out.push_back(*c);
  return out;
}

}  // namespace signalflow
