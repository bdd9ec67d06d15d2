#include "l2go/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace l2go {
namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double checked_phi(const Objective& f, const Vector& x, const Vector& d,
                   double alpha, Vector& probe, int& evals) {
  probe = x + alpha * d;
  const double v = f.value(probe);
  ++evals;
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "exact_line_search: non-finite objective at alpha=" << alpha;
    throw std::runtime_error(msg.str());
  }
  return v;
}

}  // namespace

LineSearchResult exact_line_search(const Objective& f, const Vector& x,
                                   const Vector& d,
                                   const LineSearchOptions& opts) {
  if (opts.tol <= 0.0) throw std::invalid_argument("exact_line_search: tol <= 0");
  if (!d.allFinite()) throw std::invalid_argument("exact_line_search: non-finite direction");

  LineSearchResult result;
  Vector probe(x.size());
  if (d.norm() == 0.0) {
    result.alpha = 0.0;
    result.f_at_alpha = checked_phi(f, x, d, 0.0, probe, result.evals_used);
    return result;
  }

  // Coarse scan over [0,1]; keeps the best probed point so the result can
  // never be worse than phi(0).
  const int k = opts.bracket_points < 3 ? 3 : opts.bracket_points;
  double best_alpha = 0.0;
  double best_value = 0.0;
  int best_idx = 0;
  for (int j = 0; j < k; ++j) {
    const double alpha = static_cast<double>(j) / (k - 1);
    const double v = checked_phi(f, x, d, alpha, probe, result.evals_used);
    if (j == 0 || v < best_value) {
      best_value = v;
      best_alpha = alpha;
      best_idx = j;
    }
  }

  // Golden-section refinement inside the bracket around the scan minimum.
  double lo = static_cast<double>(best_idx > 0 ? best_idx - 1 : 0) / (k - 1);
  double hi = static_cast<double>(best_idx < k - 1 ? best_idx + 1 : k - 1) / (k - 1);
  double a = hi - kGolden * (hi - lo);
  double b = lo + kGolden * (hi - lo);
  double fa = checked_phi(f, x, d, a, probe, result.evals_used);
  double fb = checked_phi(f, x, d, b, probe, result.evals_used);
  auto consider = [&](double alpha, double v) {
    if (v < best_value) {
      best_value = v;
      best_alpha = alpha;
    }
  };
  consider(a, fa);
  consider(b, fb);
  while (hi - lo > opts.tol) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kGolden * (hi - lo);
      fa = checked_phi(f, x, d, a, probe, result.evals_used);
      consider(a, fa);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kGolden * (hi - lo);
      fb = checked_phi(f, x, d, b, probe, result.evals_used);
      consider(b, fb);
    }
  }

  result.alpha = best_alpha;
  result.f_at_alpha = best_value;
  return result;
}

Vector finite_diff_grad(const Objective& f, const Vector& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_grad: h <= 0");
  Vector g(x.size());
  Vector probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f.value(probe);
    probe[i] = x[i] - h;
    const double fm = f.value(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      std::ostringstream msg;
      msg << "finite_diff_grad: non-finite evaluation at coordinate " << i;
      throw std::runtime_error(msg.str());
    }
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vector finite_diff_grad(const Objective& f, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.lpNorm<Eigen::Infinity>());
  return finite_diff_grad(f, x, h);
}

namespace {

class ScaledObjective final : public Objective {
 public:
  ScaledObjective(ObjectivePtr inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {}

  int dim() const override { return inner_->dim(); }
  double value(const Vector& x) const override { return inner_->value(x) / scale_; }
  Vector gradient(const Vector& x) const override { return inner_->gradient(x) / scale_; }
  bool has_batch() const override { return inner_->has_batch(); }
  std::pair<double, Vector> batch_value_grad(const Vector& x,
                                             std::uint64_t batch_id) const override {
    auto [v, g] = inner_->batch_value_grad(x, batch_id);
    return {v / scale_, g / scale_};
  }

 private:
  ObjectivePtr inner_;
  double scale_;
};

}  // namespace

NormalizedObjective normalize_objective(ObjectivePtr f, const Vector& x0) {
  NormalizedObjective out;
  const double f0 = f->value(x0);
  const double scale = std::abs(f0);
  if (scale < 1e-12) {
    out.fn = std::move(f);
    out.scale = 1.0;
    out.skipped = true;
    return out;
  }
  out.fn = std::make_shared<ScaledObjective>(std::move(f), scale);
  out.scale = scale;
  out.skipped = false;
  return out;
}

}  // namespace l2go
