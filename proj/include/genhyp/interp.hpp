#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "genhyp/errors.hpp"

namespace genhyp {

// 1-D interpolation on a uniform grid through an index accessor.
// order 1 = piecewise linear, order 3 = 4-point Lagrange (clamped near edges).
// Queries outside the grid are clamped to the end values.
template <class Acc>
double interp_uniform_acc(Acc&& v, int n, double lo, double dx, double x, int order) {
  if (n == 1) return v(0);
  const double s_raw = (x - lo) / dx;
  if (s_raw <= 0.0) return v(0);
  if (s_raw >= n - 1) return v(n - 1);
  if (order <= 1) {
    int j = static_cast<int>(s_raw);
    j = std::min(j, n - 2);
    const double w = s_raw - j;
    return (1.0 - w) * v(j) + w * v(j + 1);
  }
  // cubic: 4 consecutive nodes with the query ideally in the middle cell
  int base = static_cast<int>(s_raw) - 1;
  base = std::clamp(base, 0, n - 4);
  const double s = s_raw - base;
  const double w0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  const double w1 = s * (s - 2) * (s - 3) / 2.0;
  const double w2 = -s * (s - 1) * (s - 3) / 2.0;
  const double w3 = s * (s - 1) * (s - 2) / 6.0;
  return w0 * v(base) + w1 * v(base + 1) + w2 * v(base + 2) + w3 * v(base + 3);
}

inline double interp_uniform(std::span<const double> vals, double lo, double dx, double x,
                             int order) {
  return interp_uniform_acc([&](int j) { return vals[j]; }, static_cast<int>(vals.size()), lo, dx,
                            x, order);
}

// Lagrange interpolation on up to 4 arbitrary abscissae (used across slab joints).
inline double interp_lagrange(std::span<const double> xs, std::span<const double> ys, double x) {
  const std::size_t n = xs.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
    acc += w * ys[i];
  }
  return acc;
}

}  // namespace genhyp
