#include "l2go/classic.hpp"

#include <cmath>

namespace l2go {
namespace {

bool record_or_diverge(RunTrace& trace, const Objective& f, const Vector& x) {
  const double fx = f.value(x);
  const Vector g = f.gradient(x);
  ++trace.evals;
  if (!std::isfinite(fx) || !g.allFinite()) {
    trace.status = RunStatus::diverged;
    return false;
  }
  trace.record(x, fx, g.norm());
  return true;
}

}  // namespace

RunTrace steepest_gd(const Objective& f, const Vector& x0, double eps,
                     int max_iter) {
  RunTrace trace;
  Vector x = x0;
  if (!record_or_diverge(trace, f, x)) return trace;
  for (int k = 0; k < max_iter; ++k) {
    if (trace.final_grad_norm() <= eps) {
      trace.status = RunStatus::converged;
      return trace;
    }
    const Vector d = -f.gradient(x);
    const auto ls = exact_line_search(f, x, d);
    trace.evals += ls.evals_used;
    x += ls.alpha * d;
    if (!record_or_diverge(trace, f, x)) return trace;
  }
  trace.status = trace.final_grad_norm() <= eps ? RunStatus::converged
                                                : RunStatus::max_iter;
  return trace;
}

RunTrace conjugate_gd(const Objective& f, const Vector& x0, double eps,
                      int max_iter) {
  RunTrace trace;
  const int n = static_cast<int>(x0.size());
  Vector x = x0;
  if (!record_or_diverge(trace, f, x)) return trace;
  Vector g = f.gradient(x);
  Vector d = -g;
  int since_restart = 0;
  for (int k = 0; k < max_iter; ++k) {
    if (g.norm() <= eps) {
      trace.status = RunStatus::converged;
      return trace;
    }
    const auto ls = exact_line_search(f, x, d);
    trace.evals += ls.evals_used;
    x += ls.alpha * d;
    if (!record_or_diverge(trace, f, x)) return trace;
    const Vector g_next = f.gradient(x);
    const Vector y = g_next - g;
    const double denom = d.dot(y);
    ++since_restart;
    if (since_restart >= n || std::abs(denom) < 1e-12) {
      d = -g_next;
      since_restart = 0;
    } else {
      // Crowder-Wolfe coefficient g'y / d'y.
      d = -g_next + (g_next.dot(y) / denom) * d;
      if (g_next.dot(d) >= 0.0) {  // lost descent, restart
        d = -g_next;
        since_restart = 0;
      }
    }
    g = g_next;
  }
  trace.status = trace.final_grad_norm() <= eps ? RunStatus::converged
                                                : RunStatus::max_iter;
  return trace;
}

RunTrace bfgs(const Objective& f, const Vector& x0, double eps, int max_iter) {
  RunTrace trace;
  const int n = static_cast<int>(x0.size());
  Vector x = x0;
  if (!record_or_diverge(trace, f, x)) return trace;
  Vector g = f.gradient(x);
  Matrix h = Matrix::Identity(n, n);
  for (int k = 0; k < max_iter; ++k) {
    if (g.norm() <= eps) {
      trace.status = RunStatus::converged;
      return trace;
    }
    Vector d = -(h * g);
    if (g.dot(d) >= 0.0) {  // fallback when H lost positive definiteness
      h = Matrix::Identity(n, n);
      d = -g;
    }
    const auto ls = exact_line_search(f, x, d);
    trace.evals += ls.evals_used;
    const Vector s = ls.alpha * d;
    x += s;
    if (!record_or_diverge(trace, f, x)) return trace;
    const Vector g_next = f.gradient(x);
    const Vector y = g_next - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Matrix v = Matrix::Identity(n, n) - rho * s * y.transpose();
      h = v * h * v.transpose() + rho * s * s.transpose();
    }
    g = g_next;
  }
  trace.status = trace.final_grad_norm() <= eps ? RunStatus::converged
                                                : RunStatus::max_iter;
  return trace;
}

RunTrace adam(const Objective& f, const Vector& x0, const AdamConfig& config) {
  RunTrace trace;
  Vector x = x0;
  Vector m = Vector::Zero(x.size());
  Vector v = Vector::Zero(x.size());
  if (!record_or_diverge(trace, f, x)) return trace;
  for (int t = 1; t <= config.steps; ++t) {
    const auto [fx, g] = f.batch_value_grad(x, static_cast<std::uint64_t>(t - 1));
    ++trace.evals;
    if (!std::isfinite(fx) || !g.allFinite()) {
      trace.status = RunStatus::diverged;
      return trace;
    }
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    const double mc = 1.0 - std::pow(config.beta1, t);
    const double vc = 1.0 - std::pow(config.beta2, t);
    for (int i = 0; i < x.size(); ++i) {
      x[i] -= config.lr * (m[i] / mc) /
              (std::sqrt(v[i] / vc) + config.eps);
    }
    if (!record_or_diverge(trace, f, x)) return trace;
  }
  trace.status = RunStatus::max_iter;
  return trace;
}

}  // namespace l2go
