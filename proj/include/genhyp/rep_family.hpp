#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "genhyp/errors.hpp"

namespace genhyp {

// One epsilon-indexed family of smooth functions on an interval or rectangle.
// 1-D families ignore the t argument. `deriv(eps, ax, at, x, t)` is optional;
// centered differences with step eps/10 are used when it is absent.
struct RepFamily {
  std::function<double(double, double, double)> value;
  std::function<double(double, int, int, double, double)> deriv;
  std::string label;
};

// Uniform probe lattice; nt == 1 makes it one-dimensional.
struct ProbeCompact {
  double x0 = 0.0, x1 = 1.0;
  int nx = 201;
  double t0 = 0.0, t1 = 0.0;
  int nt = 1;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double resid_rms = 0.0;  // in log10 units
};

// Ordinary least squares of log10(y) against log10(x).
inline FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("fit/bad-input", "log-log fit needs >= 2 matching points");
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0)) throw ConfigError("fit/bad-input", "log-log fit needs positive abscissae");
    lx[i] = std::log10(xs[i]);
    ly[i] = std::log10(std::max(ys[i], 1e-300));
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-30) throw ConfigError("fit/degenerate", "abscissae are collinear");
  FitResult r;
  r.slope = (n * sxy - sx * sy) / det;
  r.intercept = (sy - r.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (r.slope * lx[i] + r.intercept);
    ss += e * e;
  }
  r.resid_rms = std::sqrt(ss / n);
  return r;
}

inline FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  return fit_loglog(std::span<const double>(xs), std::span<const double>(ys));
}

enum class GrowthVerdict { moderate, negligible_like, inconclusive };

inline const char* to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::moderate: return "moderate";
    case GrowthVerdict::negligible_like: return "negligible-like";
    default: return "inconclusive";
  }
}

struct GrowthReport {
  std::vector<double> eps_grid;   // strictly decreasing, as supplied
  std::vector<double> sup_norms;  // matching sup-norms over the probe compact
  double fitted_order = 0.0;      // slope of log10(sup) vs log10(1/eps)
  double residual = 0.0;          // fit RMS, log10 units
  GrowthVerdict verdict = GrowthVerdict::inconclusive;
  double decay_order = 0.0;       // -fitted_order when negligible-like (+inf sentinel for 0)
  int usable_points = 0;          // sup overflow truncates the usable prefix
};

struct GrowthConfig {
  double resid_tol = 0.3;          // log10 residual threshold for a trusted fit
  double negligible_slope = -0.5;  // fitted orders below this count as decay
  int lattice_points = 201;        // probe lattice per axis
  int refine_rounds = 3;
  double fd_step_factor = 0.1;  // FD step = factor * eps
  double zero_floor = 1e-300;
};

namespace detail {

inline void validate_eps_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw ConfigError("grid/too-short", "epsilon grid needs >= 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0))
      throw ConfigError("grid/out-of-range", "epsilon grid values must lie in (0, 1]");
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw ConfigError("grid/not-decreasing", "epsilon grid must be strictly decreasing");
  }
}

// Max of |f| over the lattice, then shrink the window around the maximizer.
template <class F>
double sup_on_compact(F&& f, const ProbeCompact& K, int pts, int rounds) {
  double x_lo = K.x0, x_hi = K.x1, t_lo = K.t0, t_hi = K.t1;
  const bool two_d = K.nt > 1;
  int nx = std::max(3, two_d ? std::min(pts, 201) : pts);
  int nt = two_d ? std::max(3, std::min(K.nt, 201)) : 1;
  double best = 0.0, ax = x_lo, at = t_lo;
  for (int r = 0; r <= rounds; ++r) {
    const double hx = nx > 1 ? (x_hi - x_lo) / (nx - 1) : 0.0;
    const double ht = nt > 1 ? (t_hi - t_lo) / (nt - 1) : 0.0;
    for (int i = 0; i < nx; ++i) {
      const double x = x_lo + i * hx;
      for (int j = 0; j < nt; ++j) {
        const double t = t_lo + j * ht;
        const double v = std::abs(f(x, t));
        if (!(v <= best)) {  // catches NaN/inf too: propagate as the sup
          if (std::isnan(v) || std::isinf(v)) return v;
          best = v;
          ax = x;
          at = t;
        }
      }
    }
    x_lo = std::max(K.x0, ax - hx);
    x_hi = std::min(K.x1, ax + hx);
    if (two_d) {
      t_lo = std::max(K.t0, at - ht);
      t_hi = std::min(K.t1, at + ht);
    }
    nx = 17;
    nt = two_d ? 17 : 1;
  }
  return best;
}

template <class F>
double inf_on_compact(F&& f, const ProbeCompact& K, int pts, int rounds) {
  double x_lo = K.x0, x_hi = K.x1, t_lo = K.t0, t_hi = K.t1;
  const bool two_d = K.nt > 1;
  int nx = std::max(3, two_d ? std::min(pts, 201) : pts);
  int nt = two_d ? std::max(3, std::min(K.nt, 201)) : 1;
  double best = std::numeric_limits<double>::infinity(), ax = x_lo, at = t_lo;
  for (int r = 0; r <= rounds; ++r) {
    const double hx = nx > 1 ? (x_hi - x_lo) / (nx - 1) : 0.0;
    const double ht = nt > 1 ? (t_hi - t_lo) / (nt - 1) : 0.0;
    for (int i = 0; i < nx; ++i) {
      const double x = x_lo + i * hx;
      for (int j = 0; j < nt; ++j) {
        const double t = t_lo + j * ht;
        const double v = std::abs(f(x, t));
        if (v < best) {
          best = v;
          ax = x;
          at = t;
        }
      }
    }
    x_lo = std::max(K.x0, ax - hx);
    x_hi = std::min(K.x1, ax + hx);
    if (two_d) {
      t_lo = std::max(K.t0, at - ht);
      t_hi = std::min(K.t1, at + ht);
    }
    nx = 17;
    nt = two_d ? 17 : 1;
  }
  return best;
}

// d^{ax}_x d^{at}_t of the family at (eps, x, t): analytic when available,
// otherwise a centered tensor stencil with step tied to eps, shifted to stay in K.
inline double family_derivative(const RepFamily& f, const ProbeCompact& K, double eps, int ax,
                                int at, double x, double t, double step_factor) {
  if (ax == 0 && at == 0) return f.value(eps, x, t);
  if (f.deriv) return f.deriv(eps, ax, at, x, t);
  if (ax > 2 || at > 2)
    throw ConfigError("growth/derivative-order", "finite differences support orders <= 2");
  const double h = step_factor * eps;
  auto stencil = [h](int order) -> std::vector<std::pair<double, double>> {
    switch (order) {
      case 0: return {{0.0, 1.0}};
      case 1: return {{-h, -0.5 / h}, {h, 0.5 / h}};
      default: return {{-h, 1.0 / (h * h)}, {0.0, -2.0 / (h * h)}, {h, 1.0 / (h * h)}};
    }
  };
  const double xc = std::clamp(x, K.x0 + ax * h, K.x1 - ax * h);
  const double tc = K.nt > 1 ? std::clamp(t, K.t0 + at * h, K.t1 - at * h) : t;
  double acc = 0.0;
  for (const auto& [dx, wx] : stencil(ax))
    for (const auto& [dt, wt] : stencil(at)) acc += wx * wt * f.value(eps, xc + dx, tc + dt);
  return acc;
}

}  // namespace detail

inline GrowthReport estimate_growth_order(const RepFamily& f, const ProbeCompact& K,
                                          std::span<const double> eps_grid, int ax = 0, int at = 0,
                                          const GrowthConfig& cfg = {}) {
  detail::validate_eps_grid(eps_grid);
  GrowthReport rep;
  bool truncated = false;
  for (double eps : eps_grid) {
    const double sup = detail::sup_on_compact(
        [&](double x, double t) {
          return detail::family_derivative(f, K, eps, ax, at, x, t, cfg.fd_step_factor);
        },
        K, cfg.lattice_points, cfg.refine_rounds);
    if (!std::isfinite(sup)) {
      truncated = true;
      break;
    }
    rep.eps_grid.push_back(eps);
    rep.sup_norms.push_back(sup);
  }
  rep.usable_points = static_cast<int>(rep.eps_grid.size());

  bool all_zero = rep.usable_points > 0;
  for (double s : rep.sup_norms)
    if (s > cfg.zero_floor) all_zero = false;
  if (all_zero) {
    rep.verdict = GrowthVerdict::negligible_like;
    rep.fitted_order = -std::numeric_limits<double>::infinity();
    rep.decay_order = std::numeric_limits<double>::infinity();
    return rep;
  }

  if (rep.usable_points >= 2) {
    std::vector<double> inv_eps(rep.eps_grid.size());
    for (std::size_t i = 0; i < rep.eps_grid.size(); ++i) inv_eps[i] = 1.0 / rep.eps_grid[i];
    const FitResult fit = fit_loglog(inv_eps, rep.sup_norms);
    rep.fitted_order = fit.slope;
    rep.residual = fit.resid_rms;
    rep.decay_order = -fit.slope;
    if (truncated || fit.resid_rms > cfg.resid_tol)
      rep.verdict = GrowthVerdict::inconclusive;
    else
      rep.verdict = fit.slope <= cfg.negligible_slope ? GrowthVerdict::negligible_like
                                                      : GrowthVerdict::moderate;
  } else {
    rep.verdict = GrowthVerdict::inconclusive;
  }
  return rep;
}

inline GrowthReport negligibility_order(const RepFamily& f, const RepFamily& g,
                                        const ProbeCompact& K, std::span<const double> eps_grid,
                                        const GrowthConfig& cfg = {}) {
  RepFamily diff;
  diff.label = f.label + " - " + g.label;
  auto fv = f.value, gv = g.value;
  diff.value = [fv, gv](double eps, double x, double t) {
    return fv(eps, x, t) - gv(eps, x, t);
  };
  if (f.deriv && g.deriv) {
    auto fd = f.deriv, gd = g.deriv;
    diff.deriv = [fd, gd](double eps, int ax, int at, double x, double t) {
      return fd(eps, ax, at, x, t) - gd(eps, ax, at, x, t);
    };
  }
  return estimate_growth_order(diff, K, eps_grid, 0, 0, cfg);
}

struct InvertibilityResult {
  bool invertible = false;
  double fitted_p = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eps_grid, inf_norms;
};

// Theorem-style invertibility probe: inf_K |u_eps| must decay at most polynomially.
inline InvertibilityResult check_invertibility(const RepFamily& f, const ProbeCompact& K,
                                               std::span<const double> eps_grid,
                                               const GrowthConfig& cfg = {}) {
  detail::validate_eps_grid(eps_grid);
  InvertibilityResult res;
  for (double eps : eps_grid) {
    const double inf = detail::inf_on_compact(
        [&](double x, double t) { return f.value(eps, x, t); }, K, cfg.lattice_points,
        cfg.refine_rounds);
    res.eps_grid.push_back(eps);
    res.inf_norms.push_back(inf);
    if (!(inf > cfg.zero_floor)) return res;  // invertible stays false
  }
  const FitResult full = fit_loglog(res.eps_grid, res.inf_norms);
  // super-polynomial decay: the local slope keeps steepening toward small eps
  const std::size_t n = res.eps_grid.size();
  if (n >= 4) {
    const std::size_t half = n / 2;
    const FitResult up = fit_loglog(std::span(res.eps_grid).first(half),
                                    std::span(res.inf_norms).first(half));
    const FitResult low = fit_loglog(std::span(res.eps_grid).subspan(half),
                                     std::span(res.inf_norms).subspan(half));
    if (low.slope > 3.0 * std::max(up.slope, 0.5) + 2.0) return res;
  }
  res.invertible = true;
  res.fitted_p = full.slope;
  return res;
}

// Growth scale gamma(eps) together with its name, as used in the admissibility test.
struct GammaSpec {
  std::function<double(double)> gamma;
  std::string name;
};

struct GammaAdmissibility {
  int N = 0;
  bool admissible = false;
  double max_log_r_upper = 0.0;  // over the larger-eps half of the grid (natural log)
  double max_log_r_lower = 0.0;  // over the smaller-eps half
};

// Admissibility of gamma: r(eps) = eps * gamma(eps)^(gamma(eps)^N) stays bounded.
// Evaluated in log space; overflow of the tower is itself a non-admissible verdict.
inline std::vector<GammaAdmissibility> check_gamma_admissible(const GammaSpec& g, int N_max,
                                                              std::span<const double> eps_grid) {
  detail::validate_eps_grid(eps_grid);
  if (N_max < 1) throw ConfigError("gamma/bad-nmax", "N_max must be >= 1");
  const std::size_t n = eps_grid.size();
  const std::size_t half = n / 2;
  std::vector<double> gam(n);
  for (std::size_t i = 0; i < n; ++i) {
    gam[i] = g.gamma(eps_grid[i]);
    if (!(gam[i] > 0.0))
      throw ConfigError("gamma/not-positive", "gamma(eps) must be positive on the grid");
    if (i >= half && gam[i] < 1.0)
      throw ConfigError("gamma/below-one",
                        "gamma(eps) must reach >= 1 on the small-eps half of the grid");
  }
  std::vector<GammaAdmissibility> out;
  for (int N = 1; N <= N_max; ++N) {
    GammaAdmissibility a;
    a.N = N;
    double max_up = -std::numeric_limits<double>::infinity();
    double max_low = -std::numeric_limits<double>::infinity();
    bool overflow = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double tower = std::pow(gam[i], N) * std::log(gam[i]);
      const double log_r = std::log(eps_grid[i]) + tower;
      if (!std::isfinite(log_r) || log_r > 700.0) {
        overflow = true;
        break;
      }
      (i < half ? max_up : max_low) = std::max(i < half ? max_up : max_low, log_r);
    }
    a.max_log_r_upper = max_up;
    a.max_log_r_lower = max_low;
    a.admissible = !overflow && max_low <= max_up + std::log(10.0);
    out.push_back(a);
  }
  return out;
}

}  // namespace genhyp
