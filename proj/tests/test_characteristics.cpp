#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "genhyp/characteristics.hpp"

using namespace genhyp;

namespace {

FrozenSystem two_speed_system(std::function<double(int, double, double)> lambda, double l = 1.0) {
  FrozenSystem sys;
  sys.n = 2;
  sys.k = 1;
  sys.l = l;
  sys.lambda = std::move(lambda);
  sys.f = [](int, double, double, std::span<const double>) { return 0.0; };
  sys.h = [](int, double, std::span<const double>) { return 0.0; };
  sys.a = [](int, double) { return 0.0; };
  sys.f_is_zero = true;
  sys.h_is_zero = true;
  return sys;
}

const auto unit_speeds = [](int i, double, double) { return i == 0 ? -1.0 : 1.0; };

}  // namespace

TEST_CASE("trace: constant speed, floor exit") {
  auto sys = two_speed_system(unit_speeds);
  // component 2 (index 1), lambda = +1, seed with t <= x: xi(tau) = x - (t - tau)
  auto tr = trace_characteristic(sys, 1, 0.7, 0.4, 1e-10);
  CHECK(tr.exit_kind == ExitKind::initial);
  CHECK(std::abs(tr.exit_time - 0.0) < 1e-12);
  CHECK(std::abs(tr.exit_xi - 0.3) < 1e-10);
  for (std::size_t j = 0; j < tr.tau.size(); ++j)
    CHECK(std::abs(tr.xi[j] - (0.7 - (0.4 - tr.tau[j]))) < 1e-10);
}

TEST_CASE("trace: constant speed, lateral exit") {
  auto sys = two_speed_system(unit_speeds);
  // t > x: exits x = 0 at exit_time = t - x
  auto tr = trace_characteristic(sys, 1, 0.3, 0.8, 1e-10);
  CHECK(tr.exit_kind == ExitKind::left);
  CHECK(std::abs(tr.exit_time - 0.5) < 1e-9);
  CHECK(tr.exit_xi == 0.0);

  // leftward component exits right
  auto tl = trace_characteristic(sys, 0, 0.6, 0.9, 1e-10);
  CHECK(tl.exit_kind == ExitKind::right);
  CHECK(std::abs(tl.exit_time - (0.9 - 0.4)) < 1e-9);
}

TEST_CASE("trace: affine speed matches the closed form") {
  // lambda = -(1+x): xi(tau) = (1+x) e^{t-tau} - 1 (leftward component)
  auto sys = two_speed_system(
      [](int i, double x, double) { return i == 0 ? -(1.0 + x) : (1.0 + x); });
  const double x0 = 0.2, t0 = 0.9;
  auto tr = trace_characteristic(sys, 0, x0, t0, 1e-10);
  for (std::size_t j = 0; j < tr.tau.size(); ++j) {
    const double exact = (1.0 + x0) * std::exp(t0 - tr.tau[j]) - 1.0;
    CHECK(std::abs(tr.xi[j] - exact) < 1e-8);
  }
  // analytic right-boundary crossing: tau* = t - log(2/(1+x))
  const double tau_star = t0 - std::log(2.0 / (1.0 + x0));
  REQUIRE(tau_star > 0);
  CHECK(tr.exit_kind == ExitKind::right);
  CHECK(std::abs(tr.exit_time - tau_star) < 1e-8);
}

TEST_CASE("trace: seed on the inflow boundary exits immediately") {
  auto sys = two_speed_system(unit_speeds);
  auto tr = trace_characteristic(sys, 1, 0.0, 0.5, 1e-10);  // rightward at x=0
  CHECK(tr.exit_kind == ExitKind::left);
  CHECK(tr.exit_time == 0.5);
  auto tr2 = trace_characteristic(sys, 0, 1.0, 0.5, 1e-10);  // leftward at x=l
  CHECK(tr2.exit_kind == ExitKind::right);
  CHECK(tr2.exit_time == 0.5);
}

TEST_CASE("trace_to_levels agrees with the dense trace") {
  auto sys = two_speed_system(
      [](int i, double x, double) { return i == 0 ? -(1.0 + x) : (1.0 + x); });
  std::vector<double> levels;
  for (int m = 0; m <= 40; ++m) levels.push_back(0.01 * m);
  auto lt = trace_to_levels(sys, 0, 0.3, levels, 40, 1e-10);
  auto dense = trace_characteristic(sys, 0, 0.3, levels[40], 1e-10);
  CHECK(lt.kind == dense.exit_kind);
  CHECK(std::abs(lt.exit_tau - dense.exit_time) < 1e-9);
  for (std::size_t j = 0; j < lt.xi.size(); ++j) {
    const double tau = levels[lt.first_level + j];
    const double exact = 1.3 * std::exp(levels[40] - tau) - 1.0;
    CHECK(std::abs(lt.xi[j] - exact) < 1e-9);
  }
  CHECK(std::abs(lt.xi.back() - 0.3) < 1e-12);  // seed sample
}

TEST_CASE("property: semigroup of the backward flow") {
  auto sys = two_speed_system(
      [](int i, double x, double t) { return (i == 0 ? -1.0 : 1.0) * (1.0 + 0.3 * x + 0.1 * t); });
  const double tol = 1e-10;
  auto full = trace_characteristic(sys, 1, 0.8, 0.7, tol);
  // re-trace from a midpoint sample
  const std::size_t mid = full.tau.size() / 2;
  auto rest = trace_characteristic(sys, 1, full.xi[mid], full.tau[mid], tol);
  CHECK(rest.exit_kind == full.exit_kind);
  CHECK(std::abs(rest.exit_time - full.exit_time) < 2e-8);
}

TEST_CASE("property: exit time monotone in x for positive speeds") {
  auto sys = two_speed_system(
      [](int i, double x, double) { return (i == 0 ? -1.0 : 1.0) * (1.0 + 0.5 * x); });
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto tr = trace_characteristic(sys, 1, x, 0.95, 1e-9);
    const double ti = tr.exit_time;
    CHECK(ti <= prev + 1e-9);
    prev = ti;
  }
}

TEST_CASE("property: exit sides match the boundary-condition assignment") {
  auto sys = two_speed_system([](int i, double x, double t) {
    return (i == 0 ? -1.0 : 1.0) * (1.2 + 0.2 * std::sin(x + t));
  });
  for (double x : {0.05, 0.35, 0.65, 0.95}) {
    for (double t : {0.2, 0.6, 1.1}) {
      auto r = trace_characteristic(sys, 1, x, t, 1e-9);
      CHECK((r.exit_kind == ExitKind::initial || r.exit_kind == ExitKind::left));
      auto s = trace_characteristic(sys, 0, x, t, 1e-9);
      CHECK((s.exit_kind == ExitKind::initial || s.exit_kind == ExitKind::right));
    }
  }
}

TEST_CASE("trace samples support linear interpolation within tol") {
  auto sys = two_speed_system(
      [](int i, double x, double) { return i == 0 ? -(1.0 + x) : (1.0 + x); });
  const double tol = 1e-8;
  auto tr = trace_characteristic(sys, 0, 0.1, 0.6, tol);
  REQUIRE(tr.tau.size() >= 3);
  for (std::size_t j = 0; j + 1 < tr.tau.size(); ++j) {
    const double tm = 0.5 * (tr.tau[j] + tr.tau[j + 1]);
    const double lin = 0.5 * (tr.xi[j] + tr.xi[j + 1]);
    const double exact = 1.1 * std::exp(0.6 - tm) - 1.0;
    CHECK(std::abs(lin - exact) < tol);
  }
}

TEST_CASE("slab_bound_geometric: symmetric unit speeds meet at l/2") {
  auto sys = two_speed_system(unit_speeds);
  CHECK(std::abs(slab_bound_geometric(sys, 0.0, 2.0) - 0.45) < 1e-6);

  auto fast = two_speed_system([](int i, double, double) { return i == 0 ? -2.0 : 2.0; });
  CHECK(std::abs(slab_bound_geometric(fast, 0.0, 2.0) - 0.225) < 1e-6);
}

TEST_CASE("slab_bound_geometric: affine speeds match the closed-form meeting time") {
  // curves e^s - 1 and 2 e^{-s} - 1 meet at s = ln(2)/2
  auto sys = two_speed_system(
      [](int i, double x, double) { return i == 0 ? -(1.0 + x) : (1.0 + x); });
  const double expected = 0.9 * 0.5 * std::log(2.0);
  CHECK(std::abs(slab_bound_geometric(sys, 0.0, 2.0) - expected) < 1e-6);
}

TEST_CASE("slab_bound_geometric: returns 0.9*horizon when curves never meet") {
  auto sys = two_speed_system(unit_speeds);
  CHECK(slab_bound_geometric(sys, 0.0, 0.2) == Catch::Approx(0.18));
}

TEST_CASE("check_system: sign pattern and floor") {
  auto good = two_speed_system(unit_speeds);
  auto c = check_system(good, 1.0);
  CHECK(c.ok);
  CHECK(c.lambda_floor == Catch::Approx(1.0));

  auto bad = two_speed_system([](int, double, double) { return 1.0; });  // comp 1 not negative
  CHECK_FALSE(check_system(bad, 1.0).ok);

  auto tangent = two_speed_system(
      [](int i, double x, double) { return (i == 0 ? -1.0 : 1.0) * (x - 0.5) * (x - 0.5); });
  CHECK_FALSE(check_system(tangent, 1.0).ok);  // vanishes at x = 0.5
}
