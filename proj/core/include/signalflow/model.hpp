#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace signalflow {

enum class SenderType { Good, Bad };

const char* to_string(SenderType t);
SenderType parse_sender_type(std::string_view s);

// Log-odds of the good type on the extended real line. Infinite values are
// stored as IEEE infinities; NaN is rejected at construction.
class LogOdds {
 public:
  constexpr LogOdds() = default;
  explicit LogOdds(double v);

  static LogOdds plus_infinity();
  static LogOdds minus_infinity();
  static LogOdds from_belief(double mu);

  double value() const { return v_; }
  bool is_finite() const;
  bool is_plus_infinity() const;
  bool is_minus_infinity() const;
  double belief() const;

  friend bool operator==(LogOdds a, LogOdds b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(LogOdds a, LogOdds b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

double belief_of(double l);
std::string format_log_odds(LogOdds l);

struct ModelParams {
  double lambda = 1.0;
  double d = 0.0;
  double d_good = 0.0;
  double d_bad = 0.0;
  double r = 0.1;

  static ModelParams symmetric(double lambda, double d, double r);
  static ModelParams type_dependent(double lambda, double d, double d_good, double d_bad, double r);

  bool is_symmetric() const { return d_good == d && d_bad == d; }
  double baseline(SenderType t) const { return t == SenderType::Good ? d_good : d_bad; }
  double max_baseline() const { return d_good > d_bad ? d_good : d_bad; }
  void validate() const;
};

// c(e) = a e + b e^2 on [0,1]
struct CostFn {
  double a = 0.0;
  double b = 0.0;

  double operator()(double e) const;
  double marginal(double e) const;
  void validate() const;
};

bool strong_single_crossing(const CostFn& good, const CostFn& bad);

// beta(l) = m + s * e^l / (e^l + e^k)
struct BenefitFn {
  enum class Family { ShiftedLogistic, AffineLogistic };

  Family family = Family::ShiftedLogistic;
  double k = 0.0;
  double m = 0.0;
  double s = 1.0;

  static BenefitFn shifted_logistic(double k);
  static BenefitFn affine_logistic(double k, double m, double s);

  double operator()(double l) const;
  double operator()(LogOdds l) const;
  double derivative(double l) const;
  double min() const { return m; }
  double max() const { return m + s; }
  double range() const { return s; }
  bool is_constant() const { return s == 0.0; }
  // Beyond this distance from k the logistic equals its limit in double precision.
  double saturation_width() const { return 40.0; }
  void validate() const;
};

const char* to_string(BenefitFn::Family f);

void check_effort(double e, const char* what);

// ln of the signal-rate ratio; may be +-inf. The 0/0 case gives 0.
double log_rate_ratio(double e_good, double e_bad, const ModelParams& p);
LogOdds jump_target(LogOdds l, double e_good, double e_bad, const ModelParams& p);
double jump_target(double l, double e_good, double e_bad, const ModelParams& p);
double drift(double e_good, double e_bad, const ModelParams& p);
double signal_rate(SenderType t, double e, const ModelParams& p);

struct Game {
  ModelParams params;
  BenefitFn benefit;
  CostFn cost_good;
  CostFn cost_bad;

  const CostFn& cost(SenderType t) const { return t == SenderType::Good ? cost_good : cost_bad; }
  double pooling_value(double l) const { return benefit(l) / params.r; }
  void validate() const;
};

}  // namespace signalflow
