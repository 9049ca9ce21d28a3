#pragma once

#include <cstddef>
#include <vector>

namespace genhyp::poly {

// Dense polynomial in one variable, coeffs[i] * u^i.
using Poly = std::vector<double>;

inline double eval(const Poly& p, double u) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * u + p[i];
  return v;
}

inline Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly c(a.size() > b.size() ? a : b);
  const Poly& s = a.size() > b.size() ? b : a;
  for (std::size_t i = 0; i < s.size(); ++i) c[i] += s[i];
  return c;
}

inline Poly scaled(Poly p, double c) {
  for (double& v : p) v *= c;
  return p;
}

}  // namespace genhyp::poly
