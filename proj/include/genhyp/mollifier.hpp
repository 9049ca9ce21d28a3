#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "genhyp/errors.hpp"
#include "genhyp/polynomial.hpp"
#include "genhyp/quadrature.hpp"

namespace genhyp {

// Scan |f| over [lo, hi] on a uniform grid, then refine around the maximizer.
template <class F>
double scan_max_abs(F&& f, double lo, double hi, int pts = 2001, int rounds = 3) {
  if (pts < 3) pts = 3;
  double best = 0.0, arg = lo;
  double a = lo, b = hi;
  for (int r = 0; r <= rounds; ++r) {
    const double h = (b - a) / (pts - 1);
    for (int i = 0; i < pts; ++i) {
      const double x = a + i * h;
      const double v = std::abs(f(x));
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    const double w = (b - a) / (pts - 1);
    a = std::max(lo, arg - w);
    b = std::min(hi, arg + w);
    pts = 33;
  }
  return best;
}

namespace detail {

// p(u) * exp(-1/(1-u^2)) on |u| < 1, stretched to radius R (u = x/R), zero outside.
// Derivatives stay in the closed family P_m(u)/(1-u^2)^{2m} * exp(-1/(1-u^2)):
//   P_{m+1} = P_m'(1-u^2)^2 + 4m u P_m (1-u^2) - 2u P_m.
struct BumpProfile {
  double radius = 1.0;
  std::vector<poly::Poly> pm;  // pm[m] = P_m, precomputed at construction

  BumpProfile() = default;
  BumpProfile(double R, poly::Poly correction, int max_derivative = 16) : radius(R) {
    pm.reserve(max_derivative + 1);
    pm.push_back(std::move(correction));
    const poly::Poly one_minus_u2 = {1.0, 0.0, -1.0};
    const poly::Poly minus_2u = {0.0, -2.0};
    for (int m = 0; m < max_derivative; ++m) {
      poly::Poly next = poly::mul(poly::derivative(pm[m]), poly::mul(one_minus_u2, one_minus_u2));
      next = poly::add(next, poly::scaled(poly::mul(poly::mul({0.0, 1.0}, pm[m]), one_minus_u2),
                                          4.0 * m));
      next = poly::add(next, poly::mul(minus_2u, pm[m]));
      pm.push_back(std::move(next));
    }
  }

  double deriv(int m, double x) const {
    if (m < 0 || m >= static_cast<int>(pm.size()))
      throw std::invalid_argument("BumpProfile: derivative order out of precomputed range");
    const double u = x / radius;
    const double delta = 1.0 - u * u;
    if (delta <= 0.0) return 0.0;
    // exp(-1/d) * d^{-2m}, fused so underflow wins over the pole at the support edge
    const double s = -1.0 / delta - 2.0 * m * std::log(delta);
    const double e = std::exp(s);
    if (e == 0.0) return 0.0;
    return poly::eval(pm[m], u) * e / std::pow(radius, m);
  }

  double value(double x) const { return deriv(0, x); }
};

}  // namespace detail

// Compactly supported smooth kernel with unit mass and q vanishing moments.
struct Mollifier {
  int q = 0;
  double radius = 1.0;
  int quadrature_order = 24;
  detail::BumpProfile profile;
  double mass = 1.0;  // quadrature value of moment 0, kept for an exact-limits cdf

  double operator()(double x) const { return profile.value(x); }
  double derivative(int m, double x) const { return profile.deriv(m, x); }

  // k-th raw moment by composite quadrature over the support.
  double moment(int k, int order = 0, int panels = 24) const {
    const int ord = order > 0 ? order : quadrature_order;
    return integrate([&](double x) { return std::pow(x, k) * profile.value(x); }, -radius, radius,
                     panels, ord);
  }

  // Running integral from -radius, normalized so the limits are exactly 0 and 1.
  double antiderivative(double x) const {
    if (x <= -radius) return 0.0;
    if (x >= radius) return 1.0;
    const int panels = std::max(2, static_cast<int>(std::ceil((x + radius) / radius * 8)));
    return integrate([&](double y) { return profile.value(y); }, -radius, x, panels,
                     quadrature_order) /
           mass;
  }

  double sup_abs() const {
    return scan_max_abs([&](double x) { return profile.value(x); }, -radius, radius);
  }
};

// Tensor kernel phi(x, t) = factor(x) * factor(t).
struct Mollifier2D {
  Mollifier factor;
  double operator()(double x, double t) const { return factor(x) * factor(t); }
};

namespace detail {

// Solve G c = e_0 by Gaussian elimination with partial pivoting.
// Returns false when a pivot is numerically zero.
inline bool solve_moment_system(std::vector<std::vector<double>> G, std::vector<double>& c) {
  const int m = static_cast<int>(G.size());
  std::vector<double> rhs(m, 0.0);
  rhs[0] = 1.0;
  double scale = 0.0;
  for (const auto& row : G)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
    if (std::abs(G[piv][col]) < 1e-13 * scale) return false;
    std::swap(G[piv], G[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < m; ++r) {
      const double f = G[r][col] / G[col][col];
      for (int cc = col; cc < m; ++cc) G[r][cc] -= f * G[col][cc];
      rhs[r] -= f * rhs[col];
    }
  }
  c.assign(m, 0.0);
  for (int r = m - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int cc = r + 1; cc < m; ++cc) s -= G[r][cc] * c[cc];
    c[r] = s / G[r][r];
  }
  return true;
}

}  // namespace detail

// Build phi in A_q with support radius R: even polynomial correction times the bump,
// coefficients from the (even) moment system. Odd moments vanish by symmetry.
inline Mollifier build_mollifier(int q, double R, int quadrature_order = 24) {
  if (q < 0) throw ConfigError("mollifier/bad-q", "moment order q must be >= 0");
  if (!(R > 0.0)) throw ConfigError("mollifier/bad-radius", "support radius must be > 0");

  const int m = q / 2 + 1;  // unknown even coefficients c_0..c_{m-1}
  int order = quadrature_order;
  int panels = 24;
  for (int attempt = 0; attempt < 4; ++attempt) {
    // w_s = \int u^{2s} exp(-1/(1-u^2)) du on [-1, 1]
    std::vector<double> w(2 * m - 1);
    for (int s = 0; s < 2 * m - 1; ++s)
      w[s] = integrate(
          [&](double u) {
            const double d = 1.0 - u * u;
            return d <= 0.0 ? 0.0 : std::pow(u, 2 * s) * std::exp(-1.0 / d);
          },
          -1.0, 1.0, panels, order);

    std::vector<std::vector<double>> G(m, std::vector<double>(m));
    for (int r = 0; r < m; ++r)
      for (int j = 0; j < m; ++j) G[r][j] = std::pow(R, 2 * r + 1) * w[r + j];

    std::vector<double> c;
    if (!detail::solve_moment_system(std::move(G), c)) {
      order *= 2;
      panels *= 2;
      continue;
    }

    poly::Poly correction(2 * (m - 1) + 1, 0.0);
    for (int j = 0; j < m; ++j) correction[2 * j] = c[j];

    Mollifier phi;
    phi.q = q;
    phi.radius = R;
    phi.quadrature_order = order;
    phi.profile = detail::BumpProfile(R, std::move(correction));
    phi.mass = phi.moment(0, order, panels);

    // invariant check at twice the construction order
    bool ok = std::abs(phi.moment(0, 2 * order, 2 * panels) - 1.0) <= 1e-10;
    for (int k = 1; k <= q && ok; ++k)
      ok = std::abs(phi.moment(k, 2 * order, 2 * panels)) <= 1e-8;
    if (ok) return phi;
    order *= 2;
    panels *= 2;
  }
  throw DomainError("mollifier/moment-system-singular",
                    "moment system did not verify; quadrature order exhausted");
}

// x -> phi(x/eps)/eps with support radius eps*R. Derivatives pick up 1/eps^m.
struct ScaledMollifier {
  Mollifier phi;
  double eps = 1.0;

  double operator()(double x) const { return phi(x / eps) / eps; }
  double derivative(int m, double x) const {
    return phi.derivative(m, x / eps) / std::pow(eps, m + 1);
  }
  double radius() const { return eps * phi.radius; }
  double antiderivative(double x) const { return phi.antiderivative(x / eps); }
};

inline ScaledMollifier scale(const Mollifier& phi, double eps) {
  if (!(eps > 0.0)) throw ConfigError("mollifier/bad-epsilon", "epsilon must be > 0");
  return ScaledMollifier{phi, eps};
}

}  // namespace genhyp
