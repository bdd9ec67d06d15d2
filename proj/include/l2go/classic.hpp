#pragma once

#include <cstdint>

#include "l2go/core.hpp"
#include "l2go/trace.hpp"

namespace l2go {

/// Steepest descent with exact line search in [0,1]; stops at |g| <= eps.
RunTrace steepest_gd(const Objective& f, const Vector& x0, double eps,
                     int max_iter);

/// Crowder-Wolfe nonlinear conjugate gradient with exact line search.
/// Restarts to the steepest direction every n iterations or when the
/// denominator d'y degenerates.
RunTrace conjugate_gd(const Objective& f, const Vector& x0, double eps,
                      int max_iter);

/// BFGS on the inverse Hessian with H0 = I and exact line search; the
/// update is skipped when the curvature s'y is not usable.
RunTrace bfgs(const Objective& f, const Vector& x0, double eps, int max_iter);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;  // stated alongside beta1 as "0.9 and 0.9"
  double eps = 1e-8;
  int steps = 1000;
};

/// ADAM on mini-batch gradients (batch ids 0,1,2,... so a run is
/// reproducible). Objectives without batch support fall back to the full
/// gradient.
RunTrace adam(const Objective& f, const Vector& x0, const AdamConfig& config);

}  // namespace l2go
