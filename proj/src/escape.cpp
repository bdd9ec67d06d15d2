#include "l2go/escape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "l2go/rng.hpp"

namespace l2go {

void EscapeConfig::validate() const {
  if (a <= 0 || delta0 <= 0 || M <= 0 || alpha_step <= 0 || alpha_a <= 0 ||
      eps <= 0 || sigma < 0 || P <= 0 || N0 <= 0 || max_outer <= 0) {
    throw std::invalid_argument("EscapeConfig: non-positive field");
  }
  if (N < 2) throw std::invalid_argument("EscapeConfig: N < 2");
}

std::string to_string(ScoreStatus status) {
  switch (status) {
    case ScoreStatus::stationary: return "stationary";
    case ScoreStatus::bound_exit: return "bound_exit";
    case ScoreStatus::sign_flip: return "sign_flip";
  }
  return "unknown";
}

EscapeStateBuffer::EscapeStateBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("EscapeStateBuffer: capacity < 1");
}

void EscapeStateBuffer::push(const Vector& d, double u) {
  if (full()) entries_.pop_front();
  entries_.push_back(Entry{d, u});
}

double t_schedule(double a, double alpha_step, double delta0, int i) {
  if (i < 1) throw std::invalid_argument("t_schedule: i < 1");
  return std::pow(1.0 + 2.0 * a * alpha_step, i - 1) * delta0;
}

double score_along(const Objective& f, const Vector& x0, const Vector& d,
                   const std::vector<Vector>& iterates) {
  if (iterates.empty()) throw std::invalid_argument("score_along: no iterates");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& x : iterates) {
    best = std::max(best, -f.gradient(x).dot(d));
  }
  return best;
}

namespace {

// Ray points x_1 .. x_N via the iterate recurrence
// x_j = x_{j-1} + alpha 2a (x_{j-1} - x0).
std::vector<Vector> ray_points(const Vector& x0, const Vector& d, double a,
                               const EscapeConfig& cfg, int n) {
  std::vector<Vector> pts;
  pts.reserve(n);
  pts.push_back(x0 + cfg.delta0 * d);
  for (int j = 2; j <= n; ++j) {
    pts.push_back(pts.back() + cfg.alpha_step * 2.0 * a * (pts.back() - x0));
  }
  return pts;
}

void check_finite(const Objective& f, const Vector& x, double v) {
  if (!std::isfinite(v)) {
    (void)f;
    throw std::runtime_error("escape: non-finite objective value");
  }
  (void)x;
}

}  // namespace

double escape_F(const Objective& f, const Vector& x0, const Vector& d, double a,
                const EscapeConfig& cfg) {
  const auto pts = ray_points(x0, d, a, cfg, cfg.N);
  double sum = 0.0;
  for (int j = 2; j <= cfg.N; ++j) {
    const double v = f.value(pts[j - 1]);
    check_finite(f, pts[j - 1], v);
    sum += v / static_cast<double>(j - 1);
  }
  return sum;
}

double escape_F_prime(const Objective& f, const Vector& x0, const Vector& d,
                      double a, const EscapeConfig& cfg) {
  double sum = 0.0;
  double t_prev = t_schedule(a, cfg.alpha_step, cfg.delta0, 1);
  for (int i = 2; i <= cfg.N; ++i) {
    const double t_i = t_schedule(a, cfg.alpha_step, cfg.delta0, i);
    const Vector x = x0 + t_i * d;
    const Vector g = f.gradient(x);
    if (!g.allFinite()) throw std::runtime_error("escape: non-finite gradient");
    sum += g.dot(d) * (t_i - t_prev);
    t_prev = t_i;
  }
  return sum / a;
}

DirectionScore find_escape_slow(const Objective& f, const Vector& x0,
                                const Vector& d, const EscapeConfig& cfg) {
  cfg.validate();
  DirectionScore out;
  out.d = d;
  double a = cfg.a;
  std::vector<Vector> pts;
  ScoreStatus status = ScoreStatus::bound_exit;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    pts = ray_points(x0, d, a, cfg, cfg.N);
    if ((pts.back() - x0).norm() >= cfg.M) {
      status = ScoreStatus::bound_exit;
      break;
    }
    const double fprime = escape_F_prime(f, x0, d, a, cfg);
    if (std::abs(fprime) <= cfg.eps) {
      status = ScoreStatus::stationary;
      break;
    }
    a += cfg.alpha_a * fprime;
    if (a < 1e-6 || a > 1e6) {
      a = std::clamp(a, 1e-6, 1e6);
      out.a_clamped = true;
    }
  }
  out.status = status;
  out.u = score_along(f, x0, d, pts);
  if (status == ScoreStatus::bound_exit) out.u = -std::abs(out.u);
  out.x_land = pts.back();
  return out;
}

DirectionScore find_escape_fast(const Objective& f, const Vector& x0,
                                const Vector& d, const EscapeConfig& cfg) {
  cfg.validate();
  DirectionScore out;
  out.d = d;
  Vector x = x0 + cfg.delta0 * d;
  double u = -f.gradient(x).dot(d);
  double q = 0.0;
  ScoreStatus status = ScoreStatus::bound_exit;
  const int hard_cap = 100000;
  for (int i = 2; i <= hard_cap; ++i) {
    const double s_q = q;
    const Vector x_next = x + cfg.alpha_step * 2.0 * cfg.a * (x - x0);
    const Vector g = f.gradient(x_next);
    if (!g.allFinite()) throw std::runtime_error("escape: non-finite gradient");
    q += g.dot(x_next - x);
    u = std::max(u, -g.dot(d));
    x = x_next;
    if (s_q < 0.0 && q > 0.0) {
      status = ScoreStatus::sign_flip;
      break;
    }
    if ((x - x0).norm() >= cfg.M) {
      status = ScoreStatus::bound_exit;
      break;
    }
  }
  out.status = status;
  out.u = status == ScoreStatus::bound_exit ? -std::abs(u) : u;
  out.x_land = x;
  return out;
}

double fast_escape_Q(const Objective& f, const Vector& x0, const Vector& d,
                     const EscapeConfig& cfg, int n_steps) {
  Vector x = x0 + cfg.delta0 * d;
  double q = 0.0;
  for (int i = 2; i <= n_steps; ++i) {
    const Vector x_next = x + cfg.alpha_step * 2.0 * cfg.a * (x - x0);
    q += f.gradient(x_next).dot(x_next - x);
    x = x_next;
  }
  return q;
}

DirectionScore score_direction(const Objective& f, const Vector& x0,
                               const Vector& d, const EscapeConfig& cfg,
                               ScorerKind scorer) {
  return scorer == ScorerKind::slow ? find_escape_slow(f, x0, d, cfg)
                                    : find_escape_fast(f, x0, d, cfg);
}

Vector sample_direction_fixed(const EscapeStateBuffer& buffer, double sigma,
                              std::mt19937_64& rng) {
  const int n = static_cast<int>(buffer.direction(0).size());
  Vector base = Vector::Zero(n);
  for (int i = 0; i < buffer.size(); ++i) {
    base -= std::abs(buffer.score(i)) * buffer.direction(i);
  }
  for (int tries = 0; tries < 100; ++tries) {
    const Vector candidate = base + gaussian_vector(rng, n, sigma);
    const double norm = candidate.norm();
    if (norm > 1e-12) return candidate / norm;
    if (sigma == 0.0) break;  // resampling cannot help
  }
  return random_unit_vector(rng, n);
}

DirectionSampler make_fixed_sampler(double sigma) {
  return [sigma](const EscapeStateBuffer& buffer, std::mt19937_64& rng,
                 Vector* pre_norm) {
    Vector d = sample_direction_fixed(buffer, sigma, rng);
    if (pre_norm) *pre_norm = d;
    return d;
  };
}

DirectionSampler make_random_sampler() {
  return [](const EscapeStateBuffer& buffer, std::mt19937_64& rng,
            Vector* pre_norm) {
    Vector d = random_unit_vector(rng, static_cast<int>(buffer.direction(0).size()));
    if (pre_norm) *pre_norm = d;
    return d;
  };
}

EscapeOutcome escape_session(const Objective& f, const Vector& x0,
                             const EscapeConfig& cfg, const DirectionSampler& sampler,
                             ScorerKind scorer, std::mt19937_64& rng) {
  cfg.validate();
  EscapeOutcome outcome;
  EscapeStateBuffer buffer(cfg.N0);
  const int n = static_cast<int>(x0.size());
  for (int i = 0; i < cfg.N0; ++i) {
    const Vector d = random_unit_vector(rng, n);
    const DirectionScore score = score_direction(f, x0, d, cfg, scorer);
    buffer.push(d, score.u);
    outcome.log.push_back(SamplingRecord{0, d, score.u, score.status, score.x_land});
  }
  outcome.samplings_used = cfg.P;
  for (int t = 1; t <= cfg.P; ++t) {
    const Vector d = sampler(buffer, rng, nullptr);
    const DirectionScore score = score_direction(f, x0, d, cfg, scorer);
    outcome.log.push_back(SamplingRecord{t, d, score.u, score.status, score.x_land});
    if (score.u > 0.0) {
      outcome.starts.push_back(score.x_land);
      outcome.dirs.push_back(d);
      if (!outcome.success) {
        outcome.success = true;
        outcome.samplings_used = t;
      }
    }
    buffer.push(d, score.u);
  }
  return outcome;
}

EscapeOutcome escape_fixed_policy(const Objective& f, const Vector& x0,
                                  const EscapeConfig& cfg, std::mt19937_64& rng,
                                  ScorerKind scorer) {
  return escape_session(f, x0, cfg, make_fixed_sampler(cfg.sigma), scorer, rng);
}

void write_session_csv(const EscapeOutcome& outcome, int dim,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_session_csv: cannot write " + path);
  out << "sampling,score,status";
  for (int i = 0; i < dim; ++i) out << ",d" << i;
  for (int i = 0; i < dim; ++i) out << ",land" << i;
  out << "\n";
  out.precision(17);
  for (const auto& rec : outcome.log) {
    out << rec.index << "," << rec.u << "," << to_string(rec.status);
    for (int i = 0; i < dim; ++i) out << "," << rec.d[i];
    for (int i = 0; i < dim; ++i) out << "," << rec.x_land[i];
    out << "\n";
  }
}

}  // namespace l2go
