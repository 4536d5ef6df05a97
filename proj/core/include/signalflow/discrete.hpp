#pragma once

#include <optional>
#include <string>
#include <vector>

namespace signalflow {

// Noiseless discrete-time game with beta(l) = e^l / (1 + e^l).
struct DiscreteParams {
  double delta = 0.9;
  double cost_good = 1.0;
  double cost_bad = 2.0;
  double l0 = 0.0;

  void validate() const;
};

struct DiscreteCandidate {
  double e0 = 0.0;
  double q_good = 0.0;
  double e1 = 0.0;
};

struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct DiscreteReport {
  Inequality scrutiny_good;
  Inequality scrutiny_bad;
  Inequality bad_first_period;
  double indifference_lhs = 0.0;
  double indifference_rhs = 0.0;
  double good_indifference_residual = 0.0;  // lhs - rhs
  bool separating = false;  // q_G at 0 or 1
  std::vector<std::string> notes;

  bool inequalities_pass() const;
  bool pass(double residual_tolerance = 1e-10) const;
};

DiscreteReport check_discrete(const DiscreteParams& p, const DiscreteCandidate& c,
                              double tolerance = 1e-12);

// Root in (0,1) of the good type's indifference equation.
std::optional<double> solve_q(const DiscreteParams& p, double e0, double e1);

struct DiscreteGrid {
  double e0_max = 1.0;
  double e1_max = 1.0;
  int divisions = 20;  // e = max * i / divisions, i = 1..divisions
};

struct DiscreteSolution {
  DiscreteCandidate candidate;
  DiscreteReport report;
};

std::vector<DiscreteSolution> search_discrete(const DiscreteParams& p, const DiscreteGrid& grid);

}  // namespace signalflow
