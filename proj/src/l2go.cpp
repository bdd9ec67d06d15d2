#include "l2go/l2go.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "l2go/parallel.hpp"

namespace l2go {

std::string to_string(LocalKind kind) {
  switch (kind) {
    case LocalKind::gdnet: return "gdnet";
    case LocalKind::gd: return "gd";
    case LocalKind::bfgs: return "bfgs";
  }
  return "unknown";
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::random: return "random";
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::learned: return "learned";
  }
  return "unknown";
}

std::string to_string(StopReason reason) {
  return reason == StopReason::budget ? "budget" : "no_direction";
}

std::string L2goReport::to_json_string() const {
  nlohmann::json j;
  j["stop_reason"] = to_string(stop_reason);
  j["best_f"] = best_f;
  j["best_x"] = std::vector<double>(best_x.data(), best_x.data() + best_x.size());
  j["cycles"] = nlohmann::json::array();
  for (const auto& c : cycles) {
    j["cycles"].push_back(
        {{"local_min", std::vector<double>(c.local_min.data(),
                                           c.local_min.data() + c.local_min.size())},
         {"f_value", c.f_value},
         {"escape_samplings", c.escape_samplings},
         {"starts_found", c.starts_found},
         {"local_diverged", c.local_diverged}});
  }
  return j.dump(2);
}

void L2goReport::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("L2goReport: cannot write " + path);
  out << to_json_string() << "\n";
}

namespace {

RunTrace run_local(const Objective& f, const Vector& x0, const L2goConfig& config) {
  switch (config.local) {
    case LocalKind::gd:
      return steepest_gd(f, x0, config.local_eps, config.local_max_iter);
    case LocalKind::bfgs:
      return bfgs(f, x0, config.local_eps, config.local_max_iter);
    case LocalKind::gdnet:
      if (!config.dnet) throw std::invalid_argument("l2go: gdnet local search needs params");
      return gdnet_run(*config.dnet, f, x0, config.local_eps, config.gdnet_blocks);
  }
  throw std::invalid_argument("l2go: unknown local kind");
}

DirectionSampler make_sampler(const L2goConfig& config) {
  switch (config.escape) {
    case PolicyKind::random:
      return make_random_sampler();
    case PolicyKind::fixed:
      return make_fixed_sampler(config.escape_cfg.sigma);
    case PolicyKind::learned:
      if (!config.net) throw std::invalid_argument("l2go: learned policy needs a net");
      return make_learned_sampler(*config.net, config.escape_cfg.sigma);
  }
  throw std::invalid_argument("l2go: unknown policy kind");
}

}  // namespace

L2goReport l2go_run(ObjectivePtr f, const Vector& x0, const L2goConfig& config,
                    std::mt19937_64& rng) {
  if (config.K < 1) throw std::invalid_argument("l2go_run: K < 1");
  const DirectionSampler sampler = make_sampler(config);

  L2goReport report;
  RunTrace first = run_local(*f, x0, config);
  Vector x = first.final_x();
  double fx = first.final_f();
  report.stop_reason = StopReason::budget;

  for (int k = 0; k < config.K; ++k) {
    L2goCycle cycle;
    cycle.local_min = x;
    cycle.f_value = fx;

    const EscapeOutcome outcome =
        escape_session(*f, x, config.escape_cfg, sampler, config.scorer, rng);
    cycle.escape_samplings = outcome.samplings_used;
    cycle.starts_found = static_cast<int>(outcome.starts.size());

    if (outcome.starts.empty()) {
      report.cycles.push_back(cycle);
      report.stop_reason = StopReason::no_direction;
      break;
    }

    // Local searches over the start set run independently.
    std::vector<RunTrace> results(outcome.starts.size());
    parallel_for(
        outcome.starts.size(),
        [&](std::size_t i) { results[i] = run_local(*f, outcome.starts[i], config); },
        config.exec);

    Vector best_x = x;
    double best_f = fx;
    for (const auto& trace : results) {
      if (trace.status == RunStatus::diverged) {
        cycle.local_diverged = true;
        continue;
      }
      if (trace.final_f() < best_f) {
        best_f = trace.final_f();
        best_x = trace.final_x();
      }
    }
    report.cycles.push_back(cycle);

    if (best_f >= fx - 1e-10) {  // cycle made no progress
      report.stop_reason = StopReason::no_direction;
      break;
    }
    x = best_x;
    fx = best_f;
  }

  if (report.cycles.empty() || report.cycles.back().f_value > fx) {
    L2goCycle last;
    last.local_min = x;
    last.f_value = fx;
    report.cycles.push_back(last);
  }
  report.best_x = x;
  report.best_f = fx;
  return report;
}

}  // namespace l2go
