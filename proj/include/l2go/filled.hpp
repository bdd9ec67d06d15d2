#pragma once

#include <atomic>
#include <random>

#include "l2go/core.hpp"
#include "l2go/escape.hpp"

namespace l2go {

/// H(x) = -exp(a |x - x0|^2) (f(x) - f(x0)). The exponent argument is
/// clamped at 500; saturated() reports whether the clamp ever fired.
class FilledGeQin final : public Objective {
 public:
  FilledGeQin(ObjectivePtr f, Vector x0, double a);

  int dim() const override { return static_cast<int>(x0_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool saturated() const { return saturated_.load(std::memory_order_relaxed); }

 private:
  double exp_term(const Vector& x) const;

  ObjectivePtr f_;
  Vector x0_;
  double a_;
  double f0_;
  mutable std::atomic<bool> saturated_{false};
};

/// H(x) = -a |x - x0|^2 + min{0, f(x) - f(x0)}^3; the gradient at the kink
/// takes the active branch.
class FilledLiang final : public Objective {
 public:
  FilledLiang(ObjectivePtr f, Vector x0, double a);

  int dim() const override { return static_cast<int>(x0_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

 private:
  ObjectivePtr f_;
  Vector x0_;
  double a_;
  double f0_;
};

ObjectivePtr filled_ge_qin(ObjectivePtr f, const Vector& x0, double a);
ObjectivePtr filled_liang(ObjectivePtr f, const Vector& x0, double a);

enum class FilledKind { ge_qin, liang };

struct FilledEscapeConfig {
  FilledKind kind = FilledKind::liang;
  double a = 0.01;        // filled-function hyper-parameter
  double delta0 = 0.2;    // offset of the minimization start
  double M = 10.0;        // search bound around x0
  int P = 100;            // direction budget
  int max_gd_iters = 200; // inner minimization budget per direction
  double stall_eps = 1e-8;
};

struct FilledEscapeOutcome {
  bool success = false;
  int samplings_used = 0;  // directions tried until success; P if none
  Vector x_land;           // strictly-lower point when success
};

/// Classical filled-function escape baseline: per direction, descend the
/// filled function from x0 + delta0 d; a direction succeeds when the
/// descent path reaches a point with f below f(x0). Fails on stall
/// (vanishing filled gradient) or on leaving the bound.
FilledEscapeOutcome filled_escape_baseline(ObjectivePtr f, const Vector& x0,
                                           const FilledEscapeConfig& cfg,
                                           std::mt19937_64& rng);

}  // namespace l2go
