#include "l2go/filled.hpp"

#include <cmath>

#include "l2go/rng.hpp"

namespace l2go {

FilledGeQin::FilledGeQin(ObjectivePtr f, Vector x0, double a)
    : f_(std::move(f)), x0_(std::move(x0)), a_(a), f0_(f_->value(x0_)) {
  if (a <= 0.0) throw std::invalid_argument("filled_ge_qin: a <= 0");
}

double FilledGeQin::exp_term(const Vector& x) const {
  double arg = a_ * (x - x0_).squaredNorm();
  if (arg > 500.0) {
    arg = 500.0;
    saturated_.store(true, std::memory_order_relaxed);
  }
  return std::exp(arg);
}

double FilledGeQin::value(const Vector& x) const {
  return -exp_term(x) * (f_->value(x) - f0_);
}

Vector FilledGeQin::gradient(const Vector& x) const {
  const double e = exp_term(x);
  const double diff = f_->value(x) - f0_;
  const Vector r = x - x0_;
  // Clamped region: the exponential factor is constant there.
  const bool clamped = a_ * r.squaredNorm() > 500.0;
  Vector g = -e * f_->gradient(x);
  if (!clamped) g -= e * 2.0 * a_ * diff * r;
  return g;
}

FilledLiang::FilledLiang(ObjectivePtr f, Vector x0, double a)
    : f_(std::move(f)), x0_(std::move(x0)), a_(a), f0_(f_->value(x0_)) {
  if (a <= 0.0) throw std::invalid_argument("filled_liang: a <= 0");
}

double FilledLiang::value(const Vector& x) const {
  const double diff = std::min(0.0, f_->value(x) - f0_);
  return -a_ * (x - x0_).squaredNorm() + diff * diff * diff;
}

Vector FilledLiang::gradient(const Vector& x) const {
  Vector g = -2.0 * a_ * (x - x0_);
  const double diff = f_->value(x) - f0_;
  if (diff < 0.0) g += 3.0 * diff * diff * f_->gradient(x);
  return g;
}

ObjectivePtr filled_ge_qin(ObjectivePtr f, const Vector& x0, double a) {
  return std::make_shared<FilledGeQin>(std::move(f), x0, a);
}

ObjectivePtr filled_liang(ObjectivePtr f, const Vector& x0, double a) {
  return std::make_shared<FilledLiang>(std::move(f), x0, a);
}

FilledEscapeOutcome filled_escape_baseline(ObjectivePtr f, const Vector& x0,
                                           const FilledEscapeConfig& cfg,
                                           std::mt19937_64& rng) {
  const double f0 = f->value(x0);
  const ObjectivePtr h = cfg.kind == FilledKind::ge_qin
                             ? filled_ge_qin(f, x0, cfg.a)
                             : filled_liang(f, x0, cfg.a);
  FilledEscapeOutcome outcome;
  outcome.samplings_used = cfg.P;
  const int n = static_cast<int>(x0.size());
  for (int p = 1; p <= cfg.P; ++p) {
    const Vector d = random_unit_vector(rng, n);
    Vector z = x0 + cfg.delta0 * d;
    for (int it = 0; it < cfg.max_gd_iters; ++it) {
      if (f->value(z) < f0 - 1e-12) {
        outcome.success = true;
        outcome.samplings_used = p;
        outcome.x_land = z;
        return outcome;
      }
      if ((z - x0).norm() >= cfg.M) break;
      const Vector g = h->gradient(z);
      if (!g.allFinite() || g.norm() <= cfg.stall_eps) break;  // saddle/stall
      LineSearchResult ls;
      try {
        ls = exact_line_search(*h, z, -g);
      } catch (const std::runtime_error&) {
        break;
      }
      if (ls.alpha == 0.0) break;  // no descent step available
      z -= ls.alpha * g;
    }
  }
  return outcome;
}

}  // namespace l2go
