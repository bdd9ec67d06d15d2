#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "l2go/agd.hpp"
#include "l2go/escape.hpp"
#include "l2go/l2go.hpp"
#include "l2go/policy.hpp"
#include "l2go/stats.hpp"

namespace l2go {

/// A seeded escape-benchmark matrix over one objective and a set of
/// policies. Runs with no success are censored at P samplings.
struct EscapeBenchConfig {
  nlohmann::json objective;  // objective_from_config input
  std::vector<PolicyKind> policies = {PolicyKind::random, PolicyKind::fixed};
  ScorerKind scorer = ScorerKind::fast;
  EscapeConfig escape;
  int runs = 500;
  std::uint64_t seed = 0;
  std::optional<PolicyNet> net;  // required when policies include learned
  Exec exec = Exec::parallel;
};

struct EscapeBenchResult {
  // Keyed by policy name; raw samplings-to-success per run plus summaries.
  std::map<std::string, std::vector<double>> raw;
  std::map<std::string, StatSummary> summary;  // p_value vs the random policy
  Vector x0;  // refined escape origin
};

EscapeBenchResult run_escape_benchmark(const EscapeBenchConfig& config);

void write_escape_raw_csv(const EscapeBenchResult& result, const std::string& path);
void write_escape_summary_csv(const EscapeBenchResult& result, const std::string& path);

/// Per-iteration criterion curves for Gd-Net and the classical baselines
/// over shared initial points. Objectives are normalized at each initial
/// point before running.
struct LocalBenchConfig {
  nlohmann::json objective;
  DNetParams dnet;
  int n_inits = 25;
  double init_range = 3.0;
  double eps = 1e-6;
  int max_iters = 500;  // shared per-method iteration budget
  int gdnet_blocks = 50;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"gdnet", "gd", "cg", "bfgs"};
  Exec exec = Exec::parallel;
};

struct LocalCurve {
  std::string method;
  int init_index = 0;
  bool normalization_skipped = false;
  RunTrace trace;
};

std::vector<LocalCurve> run_local_benchmark(const LocalBenchConfig& config);

void write_curves_csv(const std::vector<LocalCurve>& curves, const std::string& path);

/// Finds the local minimizer of f near x_hint (BFGS refinement); used to
/// pin the escape origin of mixture presets.
Vector refine_minimizer(const Objective& f, const Vector& x_hint, double eps = 1e-10);

}  // namespace l2go
