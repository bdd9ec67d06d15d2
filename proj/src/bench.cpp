#include "l2go/bench.hpp"

#include <fstream>
#include <stdexcept>

#include "l2go/classic.hpp"
#include "l2go/parallel.hpp"
#include "l2go/presets.hpp"
#include "l2go/rng.hpp"

namespace l2go {
namespace {

DirectionSampler sampler_for(PolicyKind kind, const EscapeConfig& cfg,
                             const std::optional<PolicyNet>& net) {
  switch (kind) {
    case PolicyKind::random: return make_random_sampler();
    case PolicyKind::fixed: return make_fixed_sampler(cfg.sigma);
    case PolicyKind::learned:
      if (!net) throw std::invalid_argument("escape benchmark: learned policy needs a net");
      return make_learned_sampler(*net, cfg.sigma);
  }
  throw std::invalid_argument("escape benchmark: unknown policy");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  return out;
}

}  // namespace

Vector refine_minimizer(const Objective& f, const Vector& x_hint, double eps) {
  const RunTrace trace = bfgs(f, x_hint, eps, 500);
  return trace.final_x();
}

EscapeBenchResult run_escape_benchmark(const EscapeBenchConfig& config) {
  config.escape.validate();
  if (config.runs < 1) throw std::invalid_argument("escape benchmark: runs < 1");
  const ObjectivePtr f = objective_from_config(config.objective, config.seed);

  // Mixture presets escape from the local minimizer near the first center.
  Vector hint = Vector::Zero(f->dim());
  if (auto mix = std::dynamic_pointer_cast<const GaussianMixtureObjective>(f)) {
    hint = mix->config().centers[0];
  }
  EscapeBenchResult result;
  result.x0 = refine_minimizer(*f, hint);

  for (std::size_t pi = 0; pi < config.policies.size(); ++pi) {
    const PolicyKind kind = config.policies[pi];
    const DirectionSampler sampler = sampler_for(kind, config.escape, config.net);
    std::vector<double> samplings(config.runs, 0.0);
    parallel_for(
        static_cast<std::size_t>(config.runs),
        [&](std::size_t run) {
          auto rng = make_rng(config.seed, static_cast<std::uint64_t>(kind), run);
          const EscapeOutcome outcome = escape_session(
              *f, result.x0, config.escape, sampler, config.scorer, rng);
          samplings[run] = static_cast<double>(outcome.samplings_used);
        },
        config.exec);
    result.raw[to_string(kind)] = std::move(samplings);
  }

  const auto random_it = result.raw.find("random");
  for (const auto& [name, samples] : result.raw) {
    StatSummary s = summarize(samples);
    if (random_it != result.raw.end() && name != "random") {
      s.p_value = rank_sum_test(samples, random_it->second);
    }
    result.summary[name] = s;
  }
  return result;
}

void write_escape_raw_csv(const EscapeBenchResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "policy,run,samplings\n";
  for (const auto& [name, samples] : result.raw) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out << name << "," << i << "," << samples[i] << "\n";
    }
  }
}

void write_escape_summary_csv(const EscapeBenchResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "policy,mean,std,median,p_vs_random,n_runs\n";
  for (const auto& [name, s] : result.summary) {
    out << name << "," << s.mean << "," << s.std_dev << "," << s.median << ","
        << s.p_value << "," << s.n_runs << "\n";
  }
}

std::vector<LocalCurve> run_local_benchmark(const LocalBenchConfig& config) {
  const ObjectivePtr base = objective_from_config(config.objective, config.seed);
  const int dim = base->dim();

  std::vector<Vector> inits(config.n_inits);
  auto rng = make_rng(config.seed, 0x10ca1);
  std::uniform_real_distribution<double> box(-config.init_range, config.init_range);
  for (auto& x0 : inits) {
    x0.resize(dim);
    for (int i = 0; i < dim; ++i) x0[i] = box(rng);
  }

  std::vector<LocalCurve> curves(config.methods.size() * inits.size());
  parallel_for(
      curves.size(),
      [&](std::size_t idx) {
        const std::size_t mi = idx / inits.size();
        const std::size_t ii = idx % inits.size();
        const std::string& method = config.methods[mi];
        const NormalizedObjective normalized = normalize_objective(base, inits[ii]);
        LocalCurve curve;
        curve.method = method;
        curve.init_index = static_cast<int>(ii);
        curve.normalization_skipped = normalized.skipped;
        const Objective& f = *normalized.fn;
        if (method == "gdnet") {
          curve.trace = gdnet_run(config.dnet, f, inits[ii], config.eps, config.gdnet_blocks);
        } else if (method == "gd") {
          curve.trace = steepest_gd(f, inits[ii], config.eps, config.max_iters);
        } else if (method == "cg") {
          curve.trace = conjugate_gd(f, inits[ii], config.eps, config.max_iters);
        } else if (method == "bfgs") {
          curve.trace = bfgs(f, inits[ii], config.eps, config.max_iters);
        } else {
          throw std::invalid_argument("run_local_benchmark: unknown method " + method);
        }
        curves[idx] = std::move(curve);
      },
      config.exec);
  return curves;
}

void write_curves_csv(const std::vector<LocalCurve>& curves, const std::string& path) {
  auto out = open_out(path);
  out << "method,init,iter,criterion,grad_norm,normalization_skipped\n";
  for (const auto& c : curves) {
    for (std::size_t t = 0; t < c.trace.criteria.size(); ++t) {
      out << c.method << "," << c.init_index << "," << t << ","
          << c.trace.criteria[t] << "," << c.trace.grad_norms[t] << ","
          << (c.normalization_skipped ? 1 : 0) << "\n";
    }
  }
}

}  // namespace l2go
