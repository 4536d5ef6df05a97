#include "signalflow/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace signalflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(SenderType t) { return t == SenderType::Good ? "G" : "B"; }

SenderType parse_sender_type(std::string_view s) {
  if (s == "G" || s == "good") return SenderType::Good;
  if (s == "B" || s == "bad") return SenderType::Bad;
  throw std::invalid_argument("unknown sender type '" + std::string(s) + "'");
}

LogOdds::LogOdds(double v) : v_(v) {
  if (std::isnan(v)) throw std::domain_error("log-odds cannot be NaN");
}

LogOdds LogOdds::plus_infinity() { return LogOdds(kInf); }
LogOdds LogOdds::minus_infinity() { return LogOdds(-kInf); }

LogOdds LogOdds::from_belief(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::domain_error("belief must lie in [0,1]");
  if (mu == 0.0) return minus_infinity();
  if (mu == 1.0) return plus_infinity();
  return LogOdds(std::log(mu) - std::log1p(-mu));
}

bool LogOdds::is_finite() const { return std::isfinite(v_); }
bool LogOdds::is_plus_infinity() const { return v_ == kInf; }
bool LogOdds::is_minus_infinity() const { return v_ == -kInf; }
double LogOdds::belief() const { return belief_of(v_); }

double belief_of(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double x = std::exp(l);
  return x / (1.0 + x);
}

std::string format_log_odds(LogOdds l) {
  if (l.is_plus_infinity()) return "inf";
  if (l.is_minus_infinity()) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << l.value();
  return os.str();
}

ModelParams ModelParams::symmetric(double lambda, double d, double r) {
  return ModelParams{lambda, d, d, d, r};
}

ModelParams ModelParams::type_dependent(double lambda, double d, double d_good, double d_bad,
                                        double r) {
  return ModelParams{lambda, d, d_good, d_bad, r};
}

void ModelParams::validate() const {
  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(std::isfinite(r) && r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (!finite_nonneg(d)) throw std::invalid_argument("d must be >= 0");
  if (!finite_nonneg(d_good)) throw std::invalid_argument("d_G must be >= 0");
  if (!finite_nonneg(d_bad)) throw std::invalid_argument("d_B must be >= 0");
}

void check_effort(double e, const char* what) {
  if (!(e >= 0.0 && e <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << e << " outside [0,1]";
    throw std::domain_error(os.str());
  }
}

double CostFn::operator()(double e) const {
  check_effort(e, "effort");
  return a * e + b * e * e;
}

double CostFn::marginal(double e) const {
  check_effort(e, "effort");
  return a + 2.0 * b * e;
}

void CostFn::validate() const {
  if (!(std::isfinite(a) && a >= 0.0)) throw std::invalid_argument("cost a must be >= 0");
  if (!(std::isfinite(b) && b >= 0.0)) throw std::invalid_argument("cost b must be >= 0");
  if (a == 0.0 && b == 0.0) throw std::invalid_argument("cost must be strictly increasing");
}

bool strong_single_crossing(const CostFn& good, const CostFn& bad) {
  return good.marginal(1.0) < bad.marginal(0.0);
}

BenefitFn BenefitFn::shifted_logistic(double k) {
  return BenefitFn{Family::ShiftedLogistic, k, 0.0, 1.0};
}

BenefitFn BenefitFn::affine_logistic(double k, double m, double s) {
  return BenefitFn{Family::AffineLogistic, k, m, s};
}

double BenefitFn::operator()(double l) const {
  if (l == kInf) return max();
  if (l == -kInf) return min();
  return m + s * belief_of(l - k);
}

double BenefitFn::operator()(LogOdds l) const { return (*this)(l.value()); }

double BenefitFn::derivative(double l) const {
  if (!std::isfinite(l)) return 0.0;
  const double p = belief_of(l - k);
  return s * p * (1.0 - p);
}

void BenefitFn::validate() const {
  if (!std::isfinite(k) || !std::isfinite(m) || !std::isfinite(s))
    throw std::invalid_argument("benefit parameters must be finite");
  if (s < 0.0) throw std::invalid_argument("benefit scale s must be >= 0");
  if (family == Family::ShiftedLogistic && (m != 0.0 || s != 1.0))
    throw std::invalid_argument("shifted-logistic benefit has m = 0 and s = 1");
}

const char* to_string(BenefitFn::Family f) {
  return f == BenefitFn::Family::ShiftedLogistic ? "shifted-logistic" : "affine-logistic";
}

double log_rate_ratio(double e_good, double e_bad, const ModelParams& p) {
  check_effort(e_good, "e_G*");
  check_effort(e_bad, "e_B*");
  const double num = p.lambda * (1.0 - e_good) + p.d_good;
  const double den = p.lambda * (1.0 - e_bad) + p.d_bad;
  if (num == den) return 0.0;
  if (den == 0.0) return kInf;
  if (num == 0.0) return -kInf;
  return std::log(num / den);
}

LogOdds jump_target(LogOdds l, double e_good, double e_bad, const ModelParams& p) {
  return LogOdds(jump_target(l.value(), e_good, e_bad, p));
}

double jump_target(double l, double e_good, double e_bad, const ModelParams& p) {
  const double shift = log_rate_ratio(e_good, e_bad, p);
  if (!std::isfinite(l)) return l;
  return l + shift;
}

double drift(double e_good, double e_bad, const ModelParams& p) {
  check_effort(e_good, "e_G*");
  check_effort(e_bad, "e_B*");
  return p.lambda * (e_good - e_bad) - p.d_good + p.d_bad;
}

double signal_rate(SenderType t, double e, const ModelParams& p) {
  check_effort(e, "effort");
  return p.lambda * (1.0 - e) + p.baseline(t);
}

void Game::validate() const {
  params.validate();
  benefit.validate();
  cost_good.validate();
  cost_bad.validate();
}

}  // namespace signalflow
