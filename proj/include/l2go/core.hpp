#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>

namespace l2go {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Evaluatable scalar field with gradient. Implementations are immutable
/// after construction and safe to evaluate from multiple threads.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Mini-batch evaluation. batch_id selects a deterministic batch, so a
  /// fixed id sequence reproduces the same gradient stream. Defaults to the
  /// full-batch value/gradient.
  virtual bool has_batch() const { return false; }
  virtual std::pair<double, Vector> batch_value_grad(const Vector& x,
                                                     std::uint64_t batch_id) const {
    (void)batch_id;
    return {value(x), gradient(x)};
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// Adapter for ad-hoc objectives built from callables.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  FunctionObjective(int dim, ValueFn value, GradFn grad)
      : dim_(dim), value_(std::move(value)), grad_(std::move(grad)) {}

  int dim() const override { return dim_; }
  double value(const Vector& x) const override { return value_(x); }
  Vector gradient(const Vector& x) const override { return grad_(x); }

 private:
  int dim_;
  ValueFn value_;
  GradFn grad_;
};

struct LineSearchResult {
  double alpha = 0.0;
  double f_at_alpha = 0.0;
  int evals_used = 0;
};

struct LineSearchOptions {
  double tol = 1e-8;        // final bracket width in alpha
  int bracket_points = 33;  // coarse scan isolating the best basin in [0,1]
};

/// Minimizes phi(alpha) = f(x + alpha d) over [0, 1] by a coarse bracketing
/// scan followed by golden-section refinement. Returns the best probed
/// point, so phi(alpha) <= phi(0) always holds. d = 0 returns alpha = 0.
/// Throws std::runtime_error if phi is non-finite at any probe.
LineSearchResult exact_line_search(const Objective& f, const Vector& x,
                                   const Vector& d,
                                   const LineSearchOptions& opts = {});

/// Central differences per coordinate. Throws std::runtime_error naming the
/// offending coordinate if an evaluation is non-finite.
Vector finite_diff_grad(const Objective& f, const Vector& x, double h);

/// Same with the default step h = 1e-6 * (1 + |x|_inf).
Vector finite_diff_grad(const Objective& f, const Vector& x);

struct NormalizedObjective {
  ObjectivePtr fn;
  double scale = 1.0;  // divisor applied to values and gradients
  bool skipped = false;  // |f(x0)| below 1e-12, normalization not applied
};

/// Rescales f by |f(x0)| so the criterion at the starting point is +-1.
/// Dividing by the magnitude rather than f(x0) itself keeps minimization
/// orientation when f(x0) < 0.
NormalizedObjective normalize_objective(ObjectivePtr f, const Vector& x0);

}  // namespace l2go
