#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "genhyp/errors.hpp"
#include "genhyp/ode.hpp"

namespace genhyp {

// Problem (1)-(3) with every field frozen at one regularization parameter.
// Components 1..k (0-based: i < k) have negative speed, the rest positive.
// Optional analytic partials fall back to centered differences.
struct FrozenSystem {
  int n = 0;
  int k = 0;
  double l = 1.0;
  std::function<double(int, double, double)> lambda;                            // (i, x, t)
  std::function<double(int, double, double, std::span<const double>)> f;       // (i, x, t, y)
  std::function<double(int, double, std::span<const double>)> h;               // (i, t, z)
  std::function<double(int, double)> a;                                        // (i, x)

  std::function<double(int, double)> a_x;
  std::function<double(int, double, double)> lambda_x;
  std::function<double(int, double, double, std::span<const double>)> f_x;
  std::function<double(int, int, double, double, std::span<const double>)> f_grad;
  std::function<double(int, double, std::span<const double>)> h_t;
  std::function<double(int, int, double, std::span<const double>)> h_grad;

  bool f_is_zero = false;
  bool h_is_zero = false;
  std::string provenance;  // e.g. "eps=0.125" or "smooth data"

  bool negative_speed(int i) const { return i < k; }

  double lambda_x_at(int i, double x, double t) const {
    if (lambda_x) return lambda_x(i, x, t);
    const double s = 1e-6 * std::max(1.0, std::abs(x));
    return (lambda(i, x + s, t) - lambda(i, x - s, t)) / (2.0 * s);
  }
  double a_x_at(int i, double x) const {
    if (a_x) return a_x(i, x);
    const double s = 1e-6 * std::max(1.0, std::abs(x));
    return (a(i, x + s) - a(i, x - s)) / (2.0 * s);
  }
  double f_x_at(int i, double x, double t, std::span<const double> y) const {
    if (f_x) return f_x(i, x, t, y);
    const double s = 1e-6 * std::max(1.0, std::abs(x));
    return (f(i, x + s, t, y) - f(i, x - s, t, y)) / (2.0 * s);
  }
  double f_grad_at(int i, int j, double x, double t, std::span<const double> y) const {
    if (f_grad) return f_grad(i, j, x, t, y);
    thread_local std::vector<double> buf;
    buf.assign(y.begin(), y.end());
    double scale = 1.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    const double s = 1e-6 * scale;
    buf[j] = y[j] + s;
    const double up = f(i, x, t, buf);
    buf[j] = y[j] - s;
    const double dn = f(i, x, t, buf);
    buf[j] = y[j];
    return (up - dn) / (2.0 * s);
  }
  double h_t_at(int i, double t, std::span<const double> z) const {
    if (h_t) return h_t(i, t, z);
    const double s = 1e-6 * std::max(1.0, std::abs(t));
    return (h(i, t + s, z) - h(i, t - s, z)) / (2.0 * s);
  }
  double h_grad_at(int i, int j, double t, std::span<const double> z) const {
    if (h_grad) return h_grad(i, j, t, z);
    thread_local std::vector<double> buf;
    buf.assign(z.begin(), z.end());
    double scale = 1.0;
    for (double v : z) scale = std::max(scale, std::abs(v));
    const double s = 1e-6 * scale;
    buf[j] = z[j] + s;
    const double up = h(i, t, buf);
    buf[j] = z[j] - s;
    const double dn = h(i, t, buf);
    buf[j] = z[j];
    return (up - dn) / (2.0 * s);
  }
};

struct SystemCheck {
  bool ok = false;
  double lambda_floor = 0.0;  // min |lambda| over the probe lattice
  std::string issue;
};

// Sign pattern and invertibility floor of lambda on a probe lattice over [0,l]x[0,T].
inline SystemCheck check_system(const FrozenSystem& sys, double T, int nx = 41, int nt = 41,
                                double floor_min = 1e-8) {
  SystemCheck out;
  if (sys.n < 1 || sys.k < 1 || sys.k > sys.n) {
    out.issue = "component counts must satisfy 1 <= k <= n";
    return out;
  }
  if (!(sys.l > 0.0) || !(T > 0.0)) {
    out.issue = "strip length and horizon must be positive";
    return out;
  }
  double floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sys.n; ++i) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = sys.l * ix / (nx - 1);
      for (int it = 0; it < nt; ++it) {
        const double t = T * it / (nt - 1);
        const double lam = sys.lambda(i, x, t);
        if (!std::isfinite(lam)) {
          out.issue = "lambda is not finite on the probe lattice";
          return out;
        }
        if (sys.negative_speed(i) ? lam >= 0.0 : lam <= 0.0) {
          out.issue = "lambda sign pattern violated (components 1..k negative, k+1..n positive)";
          return out;
        }
        floor = std::min(floor, std::abs(lam));
      }
    }
  }
  out.lambda_floor = floor;
  if (floor < floor_min) {
    out.issue = "lambda magnitude falls below the invertibility floor";
    return out;
  }
  out.ok = true;
  return out;
}

inline void require_valid_system(const FrozenSystem& sys, double T) {
  const SystemCheck c = check_system(sys, T);
  if (!c.ok) throw DomainError("system/invalid", c.issue);
}

enum class ExitKind { initial, left, right };

inline const char* to_string(ExitKind k) {
  switch (k) {
    case ExitKind::initial: return "initial";
    case ExitKind::left: return "left";
    default: return "right";
  }
}

// One backward characteristic path, sampled densely enough that linear
// interpolation between samples stays within tol.
struct CharTrace {
  int component = 0;
  double seed_x = 0.0, seed_t = 0.0;
  double tol = 1e-8;
  std::vector<double> tau;  // strictly decreasing, tau.front() == seed_t
  std::vector<double> xi;   // matching positions in [0, l]
  double exit_time = 0.0;
  double exit_xi = 0.0;
  ExitKind exit_kind = ExitKind::initial;
  bool corner_flagged = false;  // exit within tol of the floor/lateral corner
};

class TraceError : public DomainError {
 public:
  TraceError(std::string code, const std::string& msg, CharTrace partial)
      : DomainError(std::move(code), msg), partial_trace(std::move(partial)) {}
  CharTrace partial_trace;
};

// Per-slab compact trace: exit data plus positions at the slab time levels.
struct LevelTrace {
  ExitKind kind = ExitKind::initial;
  double exit_tau = 0.0;
  double exit_xi = 0.0;
  int first_level = 0;       // lowest level index carrying a sample
  std::vector<double> xi;    // xi at levels first_level..seed_level (ascending in tau)
  bool corner = false;
};

namespace detail {

struct BackwardOutcome {
  ExitKind kind = ExitKind::initial;
  double exit_tau = 0.0;
  double exit_xi = 0.0;
  bool corner = false;
};

// Core backward integrator for d xi / d tau = lambda_i(xi, tau), from (x, t)
// down to floor_tau, with lateral exit localized by bisection on the step size.
// `record(tau, xi)` is invoked at the seed, at each target time (descending),
// at the exit, and (dense mode) at every accepted internal step.
template <class Record>
BackwardOutcome backward_trace(const FrozenSystem& sys, int i, double x, double t,
                               double floor_tau, double tol,
                               std::span<const double> targets_desc, bool dense,
                               Record&& record) {
  BackwardOutcome out;
  const double l = sys.l;
  record(t, x);

  // immediate lateral exit when seeded on the inflow boundary
  if (x <= 0.0 && !sys.negative_speed(i) && t > floor_tau) {
    out.kind = ExitKind::left;
    out.exit_tau = t;
    out.exit_xi = 0.0;
    return out;
  }
  if (x >= l && sys.negative_speed(i) && t > floor_tau) {
    out.kind = ExitKind::right;
    out.exit_tau = t;
    out.exit_xi = l;
    return out;
  }

  DormandPrince dp;
  std::vector<double> y{x}, ynew(1);
  auto rhs = [&](double sigma, const std::vector<double>& s, std::vector<double>& d) {
    d[0] = -sys.lambda(i, s[0], t - sigma);
  };
  const double atol = std::max(tol * 0.1, 1e-14);
  const double sigma_end = t - floor_tau;
  double sigma = 0.0;
  std::size_t ti = 0;
  double h = 0.0;

  auto fail = [&](const char* code, const char* msg) -> BackwardOutcome {
    CharTrace partial;
    partial.component = i;
    partial.seed_x = x;
    partial.seed_t = t;
    partial.tol = tol;
    throw TraceError(code, msg, std::move(partial));
  };

  while (sigma < sigma_end) {
    const double next_stop =
        ti < targets_desc.size() ? t - targets_desc[ti] : sigma_end;
    const double lam_here = sys.lambda(i, y[0], t - sigma);
    const double h_cap = 0.2 * l / std::max(std::abs(lam_here), 1e-12);
    if (h <= 0.0) h = std::min(h_cap, next_stop - sigma);
    h = std::min({h, h_cap, next_stop - sigma});
    if (h < 1e-15 * std::max(1.0, t)) {
      // target collision: snap to the stop
      sigma = next_stop;
      if (ti < targets_desc.size()) {
        record(targets_desc[ti], y[0]);
        ++ti;
      }
      h = 0.0;
      continue;
    }

    double err = dp.step(rhs, sigma, y, h, ynew, atol);
    int shrink = 0;
    while (err > 1.0) {
      h = next_step_size(h, err);
      if (++shrink > 40 || h < 1e-15 * std::max(1.0, t))
        return fail("trace/step-underflow", "step size underflow (boundary-tangent path?)");
      err = dp.step(rhs, sigma, y, h, ynew, atol);
    }
    if (dense) {  // keep linear interpolation between samples within tol
      const double lam_new = sys.lambda(i, ynew[0], t - sigma - h);
      const double kappa = std::abs(lam_new - lam_here) / h;
      if (kappa * h * h > 8.0 * tol) {
        h = 0.95 * std::sqrt(8.0 * tol / kappa);
        continue;
      }
    }

    const bool cross_left = ynew[0] <= 0.0;
    const bool cross_right = ynew[0] >= l;
    if (cross_left || cross_right) {
      const double b = cross_left ? 0.0 : l;
      // bisection on the step size; each probe is a single DP step from (y, sigma)
      double lo = 0.0, hi = h;
      std::vector<double> yprobe(1);
      for (int it = 0; it < 90 && hi - lo > tol * 0.1; ++it) {
        const double mid = 0.5 * (lo + hi);
        dp.step(rhs, sigma, y, mid, yprobe, atol);
        const bool crossed = cross_left ? (yprobe[0] <= b) : (yprobe[0] >= b);
        (crossed ? hi : lo) = mid;
      }
      const double s_star = 0.5 * (lo + hi);
      out.kind = cross_left ? ExitKind::left : ExitKind::right;
      out.exit_tau = t - sigma - s_star;
      out.exit_xi = b;
      out.corner = std::abs(out.exit_tau - floor_tau) <= tol;
      record(out.exit_tau, b);
      return out;
    }

    sigma += h;
    y = ynew;
    const double tau_now = t - sigma;
    if (ti < targets_desc.size() && sigma >= next_stop - 1e-15 * std::max(1.0, t)) {
      record(targets_desc[ti], y[0]);
      ++ti;
    } else if (dense && sigma < sigma_end) {
      record(tau_now, y[0]);
    }
    h = next_step_size(h, std::max(err, 1e-4));
  }

  out.kind = ExitKind::initial;
  out.exit_tau = floor_tau;
  out.exit_xi = std::clamp(y[0], 0.0, l);
  out.corner = std::min(out.exit_xi, l - out.exit_xi) <= tol;
  if (targets_desc.empty() || targets_desc.back() > floor_tau) record(floor_tau, out.exit_xi);
  return out;
}

}  // namespace detail

// Backward-trace the i-th characteristic from (x, t) down to tau = floor_tau,
// with adaptive sampling dense enough for linear interpolation within tol.
inline CharTrace trace_characteristic(const FrozenSystem& sys, int i, double x, double t,
                                      double tol = 1e-8, double floor_tau = 0.0) {
  if (i < 0 || i >= sys.n) throw ConfigError("trace/bad-component", "component index out of range");
  if (!(tol > 0.0)) throw ConfigError("trace/bad-tol", "tolerance must be positive");
  if (x < 0.0 || x > sys.l || t < floor_tau)
    throw ConfigError("trace/seed-outside", "seed point outside the strip");
  CharTrace tr;
  tr.component = i;
  tr.seed_x = x;
  tr.seed_t = t;
  tr.tol = tol;
  tr.tau.push_back(t);
  tr.xi.push_back(x);
  auto out = detail::backward_trace(
      sys, i, x, t, floor_tau, tol, {}, true, [&](double tau, double xi) {
        if (!tr.tau.empty() && tau >= tr.tau.back()) return;  // keep strictly decreasing
        tr.tau.push_back(tau);
        tr.xi.push_back(xi);
      });
  tr.exit_time = out.exit_tau;
  tr.exit_xi = out.exit_xi;
  tr.exit_kind = out.kind;
  tr.corner_flagged = out.corner;
  if (tr.tau.size() == 1 && out.exit_tau < t) {
    tr.tau.push_back(out.exit_tau);
    tr.xi.push_back(out.exit_xi);
  }
  return tr;
}

// Slab variant: samples exactly at the slab time levels (ascending, levels[0] is
// the slab floor). Seed must sit at level `seed_level` spatially anywhere.
inline LevelTrace trace_to_levels(const FrozenSystem& sys, int i, double x,
                                  std::span<const double> levels, int seed_level, double tol) {
  LevelTrace lt;
  if (seed_level == 0) {
    lt.exit_tau = levels[0];
    lt.exit_xi = x;
    lt.xi = {x};
    return lt;
  }
  const double t = levels[seed_level];
  std::vector<double> targets;  // descending, strictly below t
  for (int m = seed_level - 1; m >= 0; --m) targets.push_back(levels[m]);
  std::vector<double> xs;
  xs.reserve(seed_level + 1);
  auto out = detail::backward_trace(sys, i, x, t, levels[0], tol, targets, false,
                                    [&](double, double xi) { xs.push_back(xi); });
  lt.kind = out.kind;
  lt.exit_tau = out.exit_tau;
  lt.exit_xi = out.exit_xi;
  lt.corner = out.corner;
  // xs holds seed + one entry per reached level (+ exit for lateral exits)
  int reached = static_cast<int>(xs.size()) - 1;
  if (out.kind != ExitKind::initial && reached >= 0 && !xs.empty()) {
    // last entry is the lateral exit point, not a level sample
    reached -= 1;
  }
  lt.first_level = seed_level - std::max(reached, 0);
  lt.xi.assign(xs.begin(), xs.begin() + std::max(reached, 0) + 1);
  std::reverse(lt.xi.begin(), lt.xi.end());
  return lt;
}

// First time (after tau) at which the fastest rightward curve from (0, tau)
// meets the fastest leftward curve from (l, tau); +infinity when they stay
// apart through tau + horizon.
inline double meet_gap(const FrozenSystem& sys, double tau, double horizon, double tol = 1e-9) {
  const int n = sys.n;
  DormandPrince dp;
  std::vector<double> y(n), ynew(n), yprobe(n);
  for (int i = 0; i < n; ++i) y[i] = sys.negative_speed(i) ? sys.l : 0.0;
  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
    for (int i = 0; i < n; ++i) d[i] = sys.lambda(i, std::clamp(s[i], 0.0, sys.l), t);
  };
  auto gap = [&](const std::vector<double>& s) {
    double min_left = std::numeric_limits<double>::infinity();
    double max_right = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      (sys.negative_speed(i) ? min_left : max_right) =
          sys.negative_speed(i) ? std::min(min_left, s[i]) : std::max(max_right, s[i]);
    return min_left - max_right;
  };

  double t = tau;
  double h = 0.0;
  const double atol = 1e-12;
  while (t < tau + horizon) {
    double speed = 1e-12;
    for (int i = 0; i < n; ++i) speed = std::max(speed, std::abs(sys.lambda(i, y[i], t)));
    const double h_cap = 0.2 * sys.l / speed;
    if (h <= 0.0) h = h_cap;
    h = std::min({h, h_cap, tau + horizon - t});
    if (h < 1e-15 * std::max(1.0, tau + horizon)) break;

    double err = dp.step(rhs, t, y, h, ynew, atol);
    int shrink = 0;
    while (err > 1.0 && ++shrink < 40) {
      h = next_step_size(h, err);
      err = dp.step(rhs, t, y, h, ynew, atol);
    }
    if (gap(ynew) <= 0.0) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 90 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        dp.step(rhs, t, y, mid, yprobe, atol);
        (gap(yprobe) <= 0.0 ? hi : lo) = mid;
      }
      return t + 0.5 * (lo + hi) - tau;
    }
    t += h;
    y = ynew;
    h = next_step_size(h, std::max(err, 1e-4));
  }
  return std::numeric_limits<double>::infinity();
}

// Largest Delta <= horizon such that, for slab starts tau in [tau0, tau0+Delta],
// the extreme characteristics stay apart through the slab; a 0.9 safety factor
// is applied to keep the strict inequality.
inline double slab_bound_geometric(const FrozenSystem& sys, double tau0, double horizon,
                                   int probes = 17) {
  if (!(horizon > 0.0)) throw ConfigError("slab/bad-horizon", "horizon must be positive");
  auto admissible = [&](double delta) {
    for (int p = 0; p < probes; ++p) {
      const double tau = tau0 + delta * p / (probes - 1);
      if (meet_gap(sys, tau, delta * (1.0 + 1e-9)) <= delta) return false;
    }
    return true;
  };
  double lo = 0.0, hi = horizon;
  if (admissible(horizon)) return 0.9 * horizon;
  for (int it = 0; it < 60 && hi - lo > 1e-9 * std::max(1.0, horizon); ++it) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return 0.9 * lo;
}

// Minimum meet gap over slab starts probed on [t_lo, t_hi]; the planner's
// geometric bound is 0.9 times this value.
inline double min_meet_gap(const FrozenSystem& sys, double t_lo, double t_hi, double horizon,
                           int probes = 33) {
  double g = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    const double tau = t_lo + (t_hi - t_lo) * p / (probes - 1);
    g = std::min(g, meet_gap(sys, tau, horizon));
    if (!(g > 0.0)) break;
  }
  return g;
}

}  // namespace genhyp
