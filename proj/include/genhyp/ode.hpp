#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace genhyp {

// Dormand-Prince 5(4) single step on a small dynamic-dimension state.
// rhs(t, y, dy) fills dy. Returns the max component error scaled by atol.
struct DormandPrince {
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;

  template <class RHS>
  double step(RHS&& rhs, double t, const std::vector<double>& y, double h,
              std::vector<double>& out, double atol) {
    const std::size_t n = y.size();
    auto resize_all = [&](std::size_t m) {
      for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp}) v->resize(m);
    };
    if (k1.size() != n) resize_all(n);
    out.resize(n);

    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (0.2 * k1[i]);
    rhs(t + 0.2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
    rhs(t + 0.3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
    rhs(t + 0.8 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                            64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
    rhs(t + 8.0 / 9 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] + 46732.0 / 5247 * k3[i] +
                            49.0 / 176 * k4[i] - 5103.0 / 18656 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                           2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);
    rhs(t + h, out, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y4 = y[i] + h * (5179.0 / 57600 * k1[i] + 7571.0 / 16695 * k3[i] +
                                    393.0 / 640 * k4[i] - 92097.0 / 339200 * k5[i] +
                                    187.0 / 2100 * k6[i] + 1.0 / 40 * k7[i]);
      err = std::max(err, std::abs(out[i] - y4) / atol);
    }
    return err;
  }
};

inline double next_step_size(double h, double err) {
  const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
  return h * std::clamp(fac, 0.2, 5.0);
}

}  // namespace genhyp
