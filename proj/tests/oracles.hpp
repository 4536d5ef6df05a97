#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "signalflow/model.hpp"
#include "signalflow/strategy.hpp"

namespace sf_test {

using namespace signalflow;

// d = 0 switched example: shift 4.2, c_G = e/10, c_B = 200e/201, r = 1/100, lambda = 2.
Game d0_game();
double d0_l_under();
// l_0 = ln 1.49 and l_1 = 0.5; the construction goes through there.
Thresholds d0_thresholds();

// d > 0 switched example with a finite scrutiny region.
Game scrutiny_d_game();
Thresholds scrutiny_d_thresholds();

// A random valid game; d < 0 draws the baseline rate too.
Game random_game(std::mt19937_64& rng, double d = -1.0);

// Independent evaluations, kept free of the library's own helpers.
double logistic(double l, double k, double m, double s);

struct ScrutinyCase {
  double lambda = 2.0;
  double d = 0.0;
  double r = 0.01;
  double k = 0.0;
  double m = 0.0;
  double s = 1.0;
  double cost_good_at_one = 0.1;  // flow cost of the good type in scrutiny
  double l_1 = 0.0;
  double l_over = 0.0;            // may be +inf
};

// Value on [l_1, l_over) of an extremal profile (pooling below l_1), integrating
// the linear HJB backwards from the upper end with fixed-step RK4.
std::vector<double> scrutiny_rk4(const ScrutinyCase& c, bool good, std::vector<double> points,
                                 double step = 1e-3);

// l + ln((lam(1-eg)+dg)/(lam(1-eb)+db)) in 50-digit arithmetic.
double jump_oracle(double l, double eg, double eb, double lam, double dg, double db);

}  // namespace sf_test
