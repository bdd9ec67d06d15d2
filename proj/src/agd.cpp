#include "l2go/agd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "l2go/functions.hpp"
#include "l2go/rng.hpp"

namespace l2go {

DNetParams DNetParams::defaults(int T) {
  if (T < 3) throw std::invalid_argument("DNetParams: T < 3");
  DNetParams params;
  params.layers.assign(T, ThetaLayer{});
  return params;
}

std::string DNetParams::to_json_string() const {
  nlohmann::json j;
  j["format"] = "dnet-params";
  j["version"] = 1;
  j["T"] = T();
  j["rho"] = rho;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : layers) {
    j["layers"].push_back({{"w1", l.w1},
                           {"w2", l.w2},
                           {"w3", l.w3},
                           {"w4", l.w4},
                           {"beta", l.beta}});
  }
  return j.dump(2);
}

DNetParams DNetParams::from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "dnet-params") {
    throw std::runtime_error("DNetParams: unexpected format tag");
  }
  if (j.value("version", 0) != 1) {
    throw std::runtime_error("DNetParams: unsupported version");
  }
  DNetParams params;
  params.rho = j.at("rho").get<double>();
  for (const auto& l : j.at("layers")) {
    params.layers.push_back(ThetaLayer{l.at("w1").get<double>(), l.at("w2").get<double>(),
                                       l.at("w3").get<double>(), l.at("w4").get<double>(),
                                       l.at("beta").get<double>()});
  }
  if (params.T() != j.at("T").get<int>()) {
    throw std::runtime_error("DNetParams: layer count does not match T");
  }
  if (params.T() < 3) throw std::runtime_error("DNetParams: T < 3");
  return params;
}

void DNetParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("DNetParams: cannot write " + path);
  out << to_json_string() << "\n";
}

DNetParams DNetParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("DNetParams: cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

Matrix compute_R(const Vector& s, const Vector& g, const Vector& g_prev,
                 const ThetaLayer& layer) {
  const int n = static_cast<int>(s.size());
  const Vector num = layer.w1 * g - layer.w2 * g_prev;
  const Vector den = layer.w3 * g - layer.w4 * g_prev;
  const double denom = s.dot(den);
  if (std::abs(denom) < 1e-10 * s.norm() * den.norm() || denom == 0.0) {
    return Matrix::Identity(n, n);
  }
  return Matrix::Identity(n, n) - (s * num.transpose()) / denom;
}

Matrix update_RH(const AgdState& state, const ThetaLayer& layer, double rho) {
  const Matrix r = compute_R(state.s_prev, state.g, state.g_prev, layer);
  const double sy = state.s_prev2.dot(state.y_prev2);
  Matrix inner = state.RH;
  if (std::abs(sy) >= 1e-10 * state.s_prev2.norm() * state.y_prev2.norm() &&
      sy != 0.0) {
    inner += (rho / sy) * (state.s_prev2 * state.s_prev2.transpose());
  }
  return r * inner;
}

Vector agd_direction(const AgdState& state, const ThetaLayer& layer) {
  const Matrix r = compute_R(state.s_prev, state.g, state.g_prev, layer);
  const Vector rhg = state.RH * state.g;
  const Vector rg = r * state.g;
  double beta = layer.beta;
  Vector d = -(beta * rhg + (1.0 - beta) * rg);
  for (int tries = 0; state.g.dot(d) >= 0.0 && tries < 20; ++tries) {
    beta *= 0.5;
    d = -(beta * rhg + (1.0 - beta) * rg);
  }
  if (state.g.dot(d) >= 0.0) d = -state.g;
  return d;
}

namespace {

struct StepOutcome {
  bool ok = false;     // recorded a finite iterate
  bool done = false;   // gradient norm at or below eps
};

// Shared body of agd_run / dnet_apply / gdnet_run: advances `state` by one
// line-search step using the layer for the given iteration index k.
class AgdDriver {
 public:
  AgdDriver(const Objective& f, const DNetParams& params, RunTrace& trace)
      : f_(f), params_(params), trace_(trace) {}

  bool start(const Vector& x0) {
    const int n = static_cast<int>(x0.size());
    state_.x = x0;
    state_.g_prev = Vector::Zero(n);
    state_.g_prev2 = Vector::Zero(n);
    state_.s_prev = Vector::Zero(n);
    state_.s_prev2 = Vector::Zero(n);
    state_.y_prev2 = Vector::Zero(n);
    state_.RH = Matrix::Identity(n, n);
    state_.k = 0;
    return eval_and_record();
  }

  const AgdState& state() const { return state_; }
  double grad_norm() const { return trace_.final_grad_norm(); }

  // One step; k = state_.k selects the phase. Returns false on non-finite
  // values (trace status is set to diverged).
  bool step() {
    const ThetaLayer& layer =
        params_.layers[std::min(state_.k, params_.T() - 1)];
    Vector d;
    if (state_.k == 0) {
      d = -state_.g;
    } else if (state_.k == 1) {
      const Matrix r0 = compute_R(state_.s_prev, state_.g, state_.g_prev, layer);
      d = -(r0 * state_.g);  // H0 = I
      if (state_.g.dot(d) >= 0.0) d = -state_.g;
      state_.RH = r0;  // R0 H0
    } else {
      state_.RH = update_RH(state_, layer, params_.rho);
      d = agd_direction(state_, layer);
    }

    const auto ls = exact_line_search(f_, state_.x, d);
    trace_.evals += ls.evals_used;
    const Vector x_next = state_.x + ls.alpha * d;

    // Shift history: s_{k-1} becomes s_{k-2}, g_k becomes g_{k-1}.
    state_.s_prev2 = state_.s_prev;
    state_.s_prev = x_next - state_.x;
    state_.g_prev2 = state_.g_prev;
    state_.g_prev = state_.g;
    state_.x = x_next;
    ++state_.k;
    if (!eval_and_record()) return false;
    state_.y_prev2 = state_.g_prev - state_.g_prev2;
    return true;
  }

 private:
  bool eval_and_record() {
    const double fx = f_.value(state_.x);
    state_.g = f_.gradient(state_.x);
    ++trace_.evals;
    if (!std::isfinite(fx) || !state_.g.allFinite()) {
      trace_.status = RunStatus::diverged;
      return false;
    }
    trace_.record(state_.x, fx, state_.g.norm());
    return true;
  }

  const Objective& f_;
  const DNetParams& params_;
  RunTrace& trace_;
  struct FullState : AgdState {
    Vector g_prev2;
  } state_;
};

}  // namespace

RunTrace agd_run(const Objective& f, const Vector& x0, const DNetParams& params,
                 double eps, int max_iter) {
  if (eps <= 0.0) throw std::invalid_argument("agd_run: eps <= 0");
  RunTrace trace;
  AgdDriver driver(f, params, trace);
  if (!driver.start(x0)) return trace;
  for (int k = 0; k < max_iter; ++k) {
    if (driver.grad_norm() <= eps) {
      trace.status = RunStatus::converged;
      return trace;
    }
    try {
      if (!driver.step()) return trace;
    } catch (const std::runtime_error&) {
      trace.status = RunStatus::diverged;
      return trace;
    }
  }
  trace.status = driver.grad_norm() <= eps ? RunStatus::converged
                                           : RunStatus::max_iter;
  return trace;
}

RunTrace dnet_apply(const DNetParams& params, const Objective& f, const Vector& x0) {
  RunTrace trace;
  AgdDriver driver(f, params, trace);
  if (!driver.start(x0)) return trace;
  for (int k = 0; k < params.T(); ++k) {
    if (!driver.step()) return trace;
  }
  trace.status = RunStatus::max_iter;
  return trace;
}

RunTrace gdnet_run(const DNetParams& params, const Objective& f, const Vector& x0,
                   double eps, int max_blocks) {
  if (max_blocks < 1) throw std::invalid_argument("gdnet_run: max_blocks < 1");
  RunTrace trace;
  Vector x = x0;
  for (int block = 0; block < max_blocks; ++block) {
    RunTrace block_trace;
    AgdDriver driver(f, params, block_trace);
    const bool started = driver.start(x);
    trace.evals += block_trace.evals;
    if (!started) {
      trace.status = RunStatus::diverged;
      return trace;
    }
    if (block == 0) {
      trace.record(block_trace.iterates[0], block_trace.criteria[0],
                   block_trace.grad_norms[0]);
    }
    if (driver.grad_norm() <= eps) {
      trace.status = RunStatus::converged;
      return trace;
    }
    for (int k = 0; k < params.T(); ++k) {
      bool ok;
      const long evals_before = block_trace.evals;
      try {
        ok = driver.step();
      } catch (const std::runtime_error&) {
        ok = false;
      }
      trace.evals += block_trace.evals - evals_before;
      if (!ok) {
        trace.status = RunStatus::diverged;
        return trace;
      }
      trace.record(block_trace.iterates.back(), block_trace.criteria.back(),
                   block_trace.grad_norms.back());
      if (driver.grad_norm() <= eps) {
        trace.status = RunStatus::converged;
        return trace;
      }
    }
    x = block_trace.final_x();
  }
  trace.status = RunStatus::max_iter;
  return trace;
}

double dnet_loss_contribution(const RunTrace& trace) {
  double sum = 0.0;
  for (std::size_t t = 2; t < trace.criteria.size(); ++t) sum += trace.criteria[t];
  return sum;
}

double dnet_loss(const std::vector<TrainingCase>& cases, const DNetParams& params,
                 Exec exec) {
  std::vector<double> terms(cases.size(), 0.0);
  parallel_for(
      cases.size(),
      [&](std::size_t i) {
        const RunTrace trace = dnet_apply(params, *cases[i].f, cases[i].x0);
        terms[i] = trace.status == RunStatus::diverged
                       ? std::numeric_limits<double>::quiet_NaN()
                       : dnet_loss_contribution(trace);
      },
      exec);
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(cases.size());
}

namespace {

std::vector<double> flatten(const DNetParams& params) {
  std::vector<double> theta;
  theta.reserve(5 * params.layers.size());
  for (const auto& l : params.layers) {
    theta.push_back(l.w1);
    theta.push_back(l.w2);
    theta.push_back(l.w3);
    theta.push_back(l.w4);
    theta.push_back(l.beta);
  }
  return theta;
}

DNetParams unflatten(const std::vector<double>& theta, double rho) {
  DNetParams params;
  params.rho = rho;
  for (std::size_t i = 0; i + 4 < theta.size(); i += 5) {
    params.layers.push_back(
        ThetaLayer{theta[i], theta[i + 1], theta[i + 2], theta[i + 3], theta[i + 4]});
  }
  return params;
}

}  // namespace

DNetTrainResult train_dnet(const std::vector<TrainingCase>& cases,
                           const DNetTrainConfig& config, std::mt19937_64& rng) {
  if (cases.empty()) throw std::invalid_argument("train_dnet: no training cases");
  if (config.T < 3) throw std::invalid_argument("train_dnet: T < 3");

  DNetParams params = DNetParams::defaults(config.T);
  params.rho = config.rho;
  double loss0 = dnet_loss(cases, params, config.exec);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!std::isfinite(loss0)) {
    for (auto& l : params.layers) {
      l.w1 = unit(rng) - 0.5;
      l.w2 = unit(rng) - 0.5;
      l.w3 = 0.5 + unit(rng);
      l.w4 = unit(rng) - 0.5;
      l.beta = unit(rng);
    }
    loss0 = dnet_loss(cases, params, config.exec);
  }

  DNetTrainResult result;
  result.loss_history.push_back(loss0);

  std::vector<double> theta = flatten(params);
  std::vector<double> best_theta = theta;
  double best_loss = loss0;
  const std::size_t p = theta.size();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Central differences over theta; each probe re-runs the unrolled net.
    std::vector<double> probe_loss(2 * p, 0.0);
    parallel_for(
        2 * p,
        [&](std::size_t j) {
          std::vector<double> probe = theta;
          const std::size_t idx = j / 2;
          const double sign = (j % 2 == 0) ? 1.0 : -1.0;
          probe[idx] += sign * config.fd_step;
          probe_loss[j] =
              dnet_loss(cases, unflatten(probe, config.rho), Exec::serial);
        },
        config.exec);

    for (std::size_t i = 0; i < p; ++i) {
      const double grad =
          (probe_loss[2 * i] - probe_loss[2 * i + 1]) / (2.0 * config.fd_step);
      const double delta = config.lr * grad;
      theta[i] -= std::isfinite(delta) ? delta : 0.0;
    }
    // beta stays in [0,1]
    for (std::size_t i = 4; i < p; i += 5) {
      theta[i] = std::clamp(theta[i], 0.0, 1.0);
    }
    const double loss = dnet_loss(cases, unflatten(theta, config.rho), config.exec);
    result.loss_history.push_back(loss);
    if (std::isfinite(loss) && loss < best_loss) {
      best_loss = loss;
      best_theta = theta;
    }
  }

  // The epochs follow plain gradient descent; the returned parameters are
  // the best epoch's, which keeps the final loss at or below the initial.
  result.params = unflatten(best_theta, config.rho);
  return result;
}

std::vector<TrainingCase> make_gaussian_training_set(std::mt19937_64& rng,
                                                     int n_functions, int n_inits,
                                                     int dim, double cond_lo,
                                                     double cond_hi,
                                                     double init_range) {
  std::vector<TrainingCase> cases;
  std::uniform_real_distribution<double> box(-init_range, init_range);
  for (int i = 0; i < n_functions; ++i) {
    ObjectivePtr f = sample_gaussian_family(rng, dim, cond_lo, cond_hi);
    for (int j = 0; j < n_inits; ++j) {
      Vector x0(dim);
      for (int k = 0; k < dim; ++k) x0[k] = box(rng);
      cases.push_back(TrainingCase{f, x0});
    }
  }
  return cases;
}

}  // namespace l2go
