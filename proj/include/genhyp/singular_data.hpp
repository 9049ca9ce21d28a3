#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "genhyp/errors.hpp"
#include "genhyp/mollifier.hpp"
#include "genhyp/quadrature.hpp"

namespace genhyp {

struct SmoothTerm {
  std::function<double(double)> f;
  std::function<double(double)> df;  // optional analytic derivative
  std::string desc = "smooth";
};

struct DiracTerm {
  double location = 0.5;
  double weight = 1.0;
};

struct DiracDerivTerm {
  double location = 0.5;
  double weight = 1.0;
  int order = 1;
};

struct HeavisideTerm {
  double location = 0.5;
  double left = 0.0;
  double right = 1.0;
};

// Initial-data catalog: smooth handles and a fixed family of singular terms,
// combined linearly. Singular locations must sit strictly inside the domain.
struct SingularDatum {
  std::vector<std::variant<SmoothTerm, DiracTerm, DiracDerivTerm, HeavisideTerm>> terms;
  double lo = 0.0;
  double hi = 1.0;

  bool is_smooth() const {
    for (const auto& t : terms)
      if (!std::holds_alternative<SmoothTerm>(t)) return false;
    return true;
  }

  void validate() const {
    auto inside = [&](double x0, const char* what) {
      if (!(x0 > lo && x0 < hi))
        throw ConfigError("data/location-outside-domain",
                          std::string(what) + " location must lie strictly inside the domain");
    };
    for (const auto& t : terms) {
      if (const auto* d = std::get_if<DiracTerm>(&t)) inside(d->location, "dirac");
      if (const auto* d = std::get_if<DiracDerivTerm>(&t)) inside(d->location, "dirac_derivative");
      if (const auto* d = std::get_if<HeavisideTerm>(&t)) inside(d->location, "heaviside");
    }
  }

  // Smallest distance from a singular location to the domain boundary
  // (infinity when the datum is purely smooth).
  double singular_margin() const {
    double m = std::numeric_limits<double>::infinity();
    auto upd = [&](double x0) { m = std::min({m, x0 - lo, hi - x0}); };
    for (const auto& t : terms) {
      if (const auto* d = std::get_if<DiracTerm>(&t)) upd(d->location);
      if (const auto* d = std::get_if<DiracDerivTerm>(&t)) upd(d->location);
      if (const auto* d = std::get_if<HeavisideTerm>(&t)) upd(d->location);
    }
    return m;
  }
};

// d * phi_eps with analytic x-derivatives where the catalog allows it.
struct RegularizedDatum {
  std::function<double(int, double)> deriv;  // order 0 = value
  double lo = 0.0, hi = 1.0;
  double support_margin = 0.0;  // singular margin minus eps*R

  double operator()(double x) const { return deriv(0, x); }
  double sup_abs(int order = 0, int pts = 4001) const {
    return scan_max_abs([&, order](double x) { return deriv(order, x); }, lo, hi, pts);
  }
};

inline RegularizedDatum regularize(const SingularDatum& d, const Mollifier& phi, double eps) {
  if (!(eps > 0.0)) throw ConfigError("mollifier/bad-epsilon", "epsilon must be > 0");
  d.validate();
  const double r = eps * phi.radius;
  const double margin = d.singular_margin() - r;
  if (!d.is_smooth() && margin <= 0.0)
    throw DomainError("data/support-overflow",
                      "regularized support reaches the domain boundary at this epsilon "
                      "(compatibility margin violated)");

  ScaledMollifier sphi = scale(phi, eps);
  auto terms = d.terms;  // captured by value; evaluation is pure
  auto eval = [terms, sphi, phi, eps](int m, double x) -> double {
    double acc = 0.0;
    for (const auto& t : terms) {
      if (const auto* s = std::get_if<SmoothTerm>(&t)) {
        // (f * phi_eps)^{(m)}(x) = eps^{-m} \int f(x - eps v) phi^{(m)}(v) dv
        const auto& f = s->f;
        acc += integrate([&](double v) { return f(x - eps * v) * phi.derivative(m, v); },
                         -phi.radius, phi.radius, 12, phi.quadrature_order) /
               std::pow(eps, m);
      } else if (const auto* dd = std::get_if<DiracTerm>(&t)) {
        acc += dd->weight * sphi.derivative(m, x - dd->location);
      } else if (const auto* dv = std::get_if<DiracDerivTerm>(&t)) {
        const double sign = (dv->order % 2 == 0) ? 1.0 : -1.0;
        acc += dv->weight * sign * sphi.derivative(dv->order + m, x - dv->location);
      } else if (const auto* h = std::get_if<HeavisideTerm>(&t)) {
        if (m == 0)
          acc += h->left + (h->right - h->left) * sphi.antiderivative(x - h->location);
        else
          acc += (h->right - h->left) * sphi.derivative(m - 1, x - h->location);
      }
    }
    return acc;
  };

  RegularizedDatum out;
  out.deriv = eval;
  out.lo = d.lo;
  out.hi = d.hi;
  out.support_margin = margin;
  return out;
}

// Plain (unregularized) evaluation; only valid for purely smooth data.
inline std::function<double(double)> smooth_value(const SingularDatum& d) {
  if (!d.is_smooth())
    throw ConfigError("data/needs-regularization",
                      "singular datum cannot be evaluated without a mollifier");
  auto terms = d.terms;
  return [terms](double x) {
    double acc = 0.0;
    for (const auto& t : terms) acc += std::get<SmoothTerm>(t).f(x);
    return acc;
  };
}

inline std::function<double(double)> smooth_derivative(const SingularDatum& d) {
  if (!d.is_smooth())
    throw ConfigError("data/needs-regularization",
                      "singular datum cannot be differentiated without a mollifier");
  auto terms = d.terms;
  return [terms](double x) {
    double acc = 0.0;
    for (const auto& t : terms) {
      const auto& s = std::get<SmoothTerm>(t);
      if (s.df)
        acc += s.df(x);
      else {  // centered fallback
        const double h = 1e-6;
        acc += (s.f(x + h) - s.f(x - h)) / (2.0 * h);
      }
    }
    return acc;
  };
}

// amplitude * exp(1 - 1/(1 - ((x-c)/r)^2)) inside |x-c| < r, zero outside;
// peak value is exactly `amplitude`, support is exactly [c-r, c+r].
inline SmoothTerm bump_term(double center, double radius, double amplitude) {
  if (!(radius > 0.0)) throw ConfigError("data/bad-bump", "bump radius must be > 0");
  detail::BumpProfile prof(radius, {amplitude * std::exp(1.0)});
  SmoothTerm t;
  t.f = [prof, center](double x) { return prof.value(x - center); };
  t.df = [prof, center](double x) { return prof.deriv(1, x - center); };
  t.desc = "bump";
  return t;
}

}  // namespace genhyp
