#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "l2go/core.hpp"

namespace l2go {

struct EscapeConfig {
  double a = 1.0;           // initial escaping length controller
  double delta0 = 0.2;      // offset of the first ray point
  int N = 20;               // inner iterations of the slow procedure
  double M = 10.0;          // search bound around x0
  double alpha_step = 0.1;  // learning rate of the inner iterates
  double alpha_a = 0.1;     // ascent rate on a
  double eps = 1e-3;        // stationarity tolerance on F'(a)
  double sigma = 0.1;       // sampling noise
  int N0 = 2;               // state buffer size
  int P = 15;               // sampling budget per escape session
  int max_outer = 500;      // cap on a-ascent rounds (treated as bound exit)

  void validate() const;
};

enum class ScoreStatus { stationary, bound_exit, sign_flip };

std::string to_string(ScoreStatus status);

/// A scored search direction: unit d, score u (positive means promising),
/// and the landing point of the escaping procedure.
struct DirectionScore {
  Vector d;
  double u = 0.0;
  Vector x_land;
  ScoreStatus status = ScoreStatus::bound_exit;
  bool a_clamped = false;  // controller was driven to the clamp range
};

/// FIFO of the N0 most recent (direction, score) pairs; pushing into a full
/// buffer evicts the oldest entry.
class EscapeStateBuffer {
 public:
  explicit EscapeStateBuffer(int capacity);

  void push(const Vector& d, double u);
  bool full() const { return static_cast<int>(entries_.size()) == capacity_; }
  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  const Vector& direction(int i) const { return entries_[i].d; }
  double score(int i) const { return entries_[i].u; }

 private:
  struct Entry {
    Vector d;
    double u;
  };
  int capacity_;
  std::deque<Entry> entries_;
};

/// Ray schedule t_i = (1 + 2 a alpha)^(i-1) delta0, i >= 1.
double t_schedule(double a, double alpha_step, double delta0, int i);

/// u_d = max_i -grad f(x_i)' d over the given ray points.
double score_along(const Objective& f, const Vector& x0, const Vector& d,
                   const std::vector<Vector>& iterates);

/// F(a) = sum_{j=2..N} f(x_j) / (j-1) over the schedule (used by the secant
/// oracle for F').
double escape_F(const Objective& f, const Vector& x0, const Vector& d, double a,
                const EscapeConfig& cfg);

/// Closed form F'(a) = (1/a) sum_{i=2..N} grad f(x_i)' d (t_i - t_{i-1}).
double escape_F_prime(const Objective& f, const Vector& x0, const Vector& d,
                      double a, const EscapeConfig& cfg);

/// Slow escaping-length procedure: ascends a on F'(a) until |F'| <= eps
/// (stationary) or the last ray point leaves the bound M (bound_exit, score
/// forced non-positive). The score is taken over the final iterate set.
DirectionScore find_escape_slow(const Objective& f, const Vector& x0,
                                const Vector& d, const EscapeConfig& cfg);

/// Fast procedure with fixed a: accumulates Q_i = Q_{i-1} +
/// grad f(x_i)'(x_i - x_{i-1}) along the outward recurrence and stops on the
/// sign flip Q_{i-1} < 0, Q_i > 0, or on the bound.
DirectionScore find_escape_fast(const Objective& f, const Vector& x0,
                                const Vector& d, const EscapeConfig& cfg);

/// Fast-procedure run forced to exactly n_steps ray points; returns the
/// accumulated Q (equals a F'(a) on matched schedules).
double fast_escape_Q(const Objective& f, const Vector& x0, const Vector& d,
                     const EscapeConfig& cfg, int n_steps);

enum class ScorerKind { slow, fast };

DirectionScore score_direction(const Objective& f, const Vector& x0,
                               const Vector& d, const EscapeConfig& cfg,
                               ScorerKind scorer);

/// Combination d~ = sum_i (-|u_i|) d_i + noise, normalized to unit length.
/// A vanishing combination with zero noise falls back to a uniform draw.
Vector sample_direction_fixed(const EscapeStateBuffer& buffer, double sigma,
                              std::mt19937_64& rng);

/// Samples a direction given the current buffer; the second argument
/// receives the pre-normalization action (used by policy-gradient training).
using DirectionSampler =
    std::function<Vector(const EscapeStateBuffer&, std::mt19937_64&, Vector* pre_norm)>;

DirectionSampler make_fixed_sampler(double sigma);
DirectionSampler make_random_sampler();

struct SamplingRecord {
  int index = 0;  // 1-based sampling index; 0 for buffer seeds
  Vector d;
  double u = 0.0;
  ScoreStatus status = ScoreStatus::bound_exit;
  Vector x_land;
};

struct EscapeOutcome {
  std::vector<Vector> starts;          // landing points with positive score
  std::vector<Vector> dirs;            // their directions
  int samplings_used = 0;              // samplings until first success; P if none
  bool success = false;
  std::vector<SamplingRecord> log;     // seeds plus all samplings
};

/// One escape session: seeds the buffer with N0 uniform scored directions,
/// then performs P samplings from the given sampler, collecting every
/// promising (start, direction) pair and pushing each sample into the
/// buffer FIFO.
EscapeOutcome escape_session(const Objective& f, const Vector& x0,
                             const EscapeConfig& cfg, const DirectionSampler& sampler,
                             ScorerKind scorer, std::mt19937_64& rng);

/// Session with the fixed combination sampler (the fixed escaping policy).
EscapeOutcome escape_fixed_policy(const Objective& f, const Vector& x0,
                                  const EscapeConfig& cfg, std::mt19937_64& rng,
                                  ScorerKind scorer = ScorerKind::fast);

/// Writes one session log as CSV (columns: sampling, score, status,
/// direction..., landing...).
void write_session_csv(const EscapeOutcome& outcome, int dim,
                       const std::string& path);

}  // namespace l2go
