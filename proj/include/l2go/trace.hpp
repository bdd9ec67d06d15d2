#pragma once

#include <vector>

#include "l2go/core.hpp"

namespace l2go {

enum class RunStatus { converged, max_iter, diverged };

/// Per-iterate record of an optimization run. Entry 0 is the starting
/// point, so iteration count is criteria.size() - 1.
struct RunTrace {
  std::vector<Vector> iterates;
  std::vector<double> criteria;
  std::vector<double> grad_norms;
  long evals = 0;
  RunStatus status = RunStatus::max_iter;

  int iterations() const { return static_cast<int>(criteria.size()) - 1; }
  const Vector& final_x() const { return iterates.back(); }
  double final_f() const { return criteria.back(); }
  double final_grad_norm() const { return grad_norms.back(); }

  void record(const Vector& x, double f, double gnorm) {
    iterates.push_back(x);
    criteria.push_back(f);
    grad_norms.push_back(gnorm);
  }
};

}  // namespace l2go
