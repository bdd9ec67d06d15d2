#pragma once

#include <random>
#include <vector>

#include "l2go/core.hpp"

namespace l2go::testing {

// Second-order central differences of f; oracle for Hessian checks.
inline Matrix fd_hessian(const Objective& f, const Vector& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Matrix hess(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vector xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h; xpp[j] += h;
      xpm[i] += h; xpm[j] -= h;
      xmp[i] -= h; xmp[j] += h;
      xmm[i] -= h; xmm[j] -= h;
      hess(i, j) = (f.value(xpp) - f.value(xpm) - f.value(xmp) + f.value(xmm)) /
                   (4.0 * h * h);
    }
  }
  return hess;
}

// Relative gradient error against central differences at x.
inline double grad_check_error(const Objective& f, const Vector& x) {
  const Vector g = f.gradient(x);
  const Vector fd = finite_diff_grad(f, x);
  return (g - fd).norm() / (1.0 + g.norm());
}

// Dense scan of phi(alpha) = f(x + alpha d) over [0,1]; grid oracle for the
// line search.
inline std::pair<double, double> grid_line_search(const Objective& f, const Vector& x,
                                                  const Vector& d, int points) {
  double best_alpha = 0.0;
  double best_value = f.value(x);
  for (int j = 1; j < points; ++j) {
    const double alpha = static_cast<double>(j) / (points - 1);
    const double v = f.value(x + alpha * d);
    if (v < best_value) {
      best_value = v;
      best_alpha = alpha;
    }
  }
  return {best_alpha, best_value};
}

}  // namespace l2go::testing
