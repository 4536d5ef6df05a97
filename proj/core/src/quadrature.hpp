#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace signalflow::detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 8> kGLx{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGLw{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGLx.size(); ++i) s += kGLw[i] * f(c + h * kGLx[i]);
  return s * h;
}

template <class F>
double composite_gauss_legendre(F&& f, double a, double b, double width) {
  if (!(b > a)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += gauss_legendre(f, a + i * h, i + 1 == n ? b : a + (i + 1) * h);
  return s;
}

}  // namespace signalflow::detail
