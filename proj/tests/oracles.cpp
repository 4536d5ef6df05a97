#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#ifdef SIGNALFLOW_HAVE_BOOST
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

namespace sf_test {

Game d0_game() {
  return Game{ModelParams::symmetric(2.0, 0.0, 0.01), BenefitFn::shifted_logistic(4.2),
              CostFn{0.1, 0.0}, CostFn{200.0 / 201.0, 0.0}};
}

double d0_l_under() { return std::log(2.0 / 3.0); }

Thresholds d0_thresholds() {
  return {LogOdds(d0_l_under()), LogOdds(std::log(1.49)), LogOdds(0.5), LogOdds::plus_infinity()};
}

Game scrutiny_d_game() {
  return Game{ModelParams::symmetric(6.5, 0.09, 0.1), BenefitFn::shifted_logistic(0.0),
              CostFn{0.05, 0.0}, CostFn{19.0, 15.0}};
}

Thresholds scrutiny_d_thresholds() {
  return {LogOdds(2.45), LogOdds(2.47), LogOdds(2.95), LogOdds(5.6)};
}

Game random_game(std::mt19937_64& rng, double d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lambda = 0.5 + 4.5 * u(rng);
  const double dd = d >= 0.0 ? d : 0.5 * u(rng);
  const double r = 0.01 + 0.2 * u(rng);
  Game g;
  g.params = ModelParams::symmetric(lambda, dd, r);
  g.benefit = BenefitFn::affine_logistic(-3.0 + 6.0 * u(rng), -1.0 + 2.0 * u(rng), 0.2 + 2.0 * u(rng));
  g.cost_good = CostFn{0.01 + 0.2 * u(rng), 0.1 * u(rng)};
  g.cost_bad = CostFn{g.cost_good.marginal(1.0) + 0.1 + u(rng), u(rng)};
  return g;
}

double logistic(double l, double k, double m, double s) {
  if (l == std::numeric_limits<double>::infinity()) return m + s;
  if (l == -std::numeric_limits<double>::infinity()) return m;
  return m + s / (1.0 + std::exp(k - l));
}

std::vector<double> scrutiny_rk4(const ScrutinyCase& c, bool good, std::vector<double> points,
                                 double step) {
  const double rho = good ? c.d : c.lambda + c.d;
  const double cost = good ? c.cost_good_at_one : 0.0;
  const double shift = c.d > 0.0 ? std::log(c.d / (c.lambda + c.d))
                                 : -std::numeric_limits<double>::infinity();
  auto beta = [&](double l) { return logistic(l, c.k, c.m, c.s); };
  auto landing = [&](double l) { return beta(l + shift) / c.r; };
  auto rhs = [&](double l, double v) {
    return ((c.r + rho) * v - beta(l) + cost - rho * landing(l)) / c.lambda;
  };

  double l = c.l_over;
  double v = 0.0;
  if (std::isfinite(c.l_over)) {
    v = beta(l) / c.r;
  } else {
    l = std::max(c.l_1, c.k) + 45.0;
    v = (c.m + c.s - cost + rho * landing(l)) / (c.r + rho);
  }

  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] > points[b]; });
  std::vector<double> out(points.size());
  for (std::size_t idx : order) {
    const double target = points[idx];
    while (l > target) {
      const double h = -std::min(step, l - target);
      const double k1 = rhs(l, v);
      const double k2 = rhs(l + 0.5 * h, v + 0.5 * h * k1);
      const double k3 = rhs(l + 0.5 * h, v + 0.5 * h * k2);
      const double k4 = rhs(l + h, v + h * k3);
      v += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
      l = (l - target <= step) ? target : l + h;
    }
    out[idx] = v;
  }
  return out;
}

double jump_oracle(double l, double eg, double eb, double lam, double dg, double db) {
#ifdef SIGNALFLOW_HAVE_BOOST
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp num = mp(lam) * (mp(1) - mp(eg)) + mp(dg);
  const mp den = mp(lam) * (mp(1) - mp(eb)) + mp(db);
  return static_cast<double>(mp(l) + log(num / den));
#else
  const long double num = (long double)lam * (1.0L - eg) + dg;
  const long double den = (long double)lam * (1.0L - eb) + db;
  return static_cast<double>((long double)l + std::log(num / den));
#endif
}

}  // namespace sf_test
