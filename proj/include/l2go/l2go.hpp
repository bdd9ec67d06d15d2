#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "l2go/agd.hpp"
#include "l2go/classic.hpp"
#include "l2go/escape.hpp"
#include "l2go/policy.hpp"

namespace l2go {

enum class LocalKind { gdnet, gd, bfgs };
enum class PolicyKind { random, fixed, learned };

std::string to_string(LocalKind kind);
std::string to_string(PolicyKind kind);

struct L2goConfig {
  int K = 5;  // escape cycles
  LocalKind local = LocalKind::gdnet;
  PolicyKind escape = PolicyKind::fixed;
  ScorerKind scorer = ScorerKind::fast;
  EscapeConfig escape_cfg;
  double local_eps = 1e-6;
  int local_max_iter = 2000;
  int gdnet_blocks = 50;
  std::optional<DNetParams> dnet;   // required for gdnet local search
  std::optional<PolicyNet> net;     // required for the learned policy
  Exec exec = Exec::parallel;
};

struct L2goCycle {
  Vector local_min;
  double f_value = 0.0;
  int escape_samplings = 0;  // samplings until the first promising direction
  int starts_found = 0;
  bool local_diverged = false;  // some start's local search diverged
};

enum class StopReason { budget, no_direction };

std::string to_string(StopReason reason);

struct L2goReport {
  std::vector<L2goCycle> cycles;
  Vector best_x;
  double best_f = 0.0;
  StopReason stop_reason = StopReason::budget;

  std::string to_json_string() const;
  void save(const std::string& path) const;
};

/// Two-phase driver: local search to a minimizer, then alternating escape
/// sessions and local searches over the collected starts, keeping the best
/// minimizer. Stops when no promising direction is found (or the cycle made
/// no progress) or after K cycles.
L2goReport l2go_run(ObjectivePtr f, const Vector& x0, const L2goConfig& config,
                    std::mt19937_64& rng);

}  // namespace l2go
