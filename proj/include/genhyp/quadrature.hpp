#pragma once

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace genhyp {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights via Newton iteration on the Legendre recurrence.
// Rules are cached; references stay valid (node-based map).
inline const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 256)
    throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
  static std::mutex mu;
  static std::unordered_map<int, GaussRule> cache;
  std::scoped_lock lk(mu);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  const int n = order;
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  auto [pos, inserted] = cache.emplace(order, std::move(r));
  (void)inserted;
  return pos->second;
}

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 8, int order = 20) {
  if (panels < 1) throw std::invalid_argument("integrate: panels must be >= 1");
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      s += g.weights[i] * f(mid + half * g.nodes[i]);
    total += s * half;
  }
  return total;
}

}  // namespace genhyp
