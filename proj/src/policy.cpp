#include "l2go/policy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "l2go/rng.hpp"

namespace l2go {

PolicyNet::PolicyNet(int n0, int hidden)
    : n0_(n0),
      hidden_(hidden),
      w1_(Matrix::Zero(hidden, n0)),
      b1_(Vector::Zero(hidden)),
      w2_(Matrix::Zero(n0, hidden)),
      b2_(Vector::Zero(n0)) {
  if (n0 < 1 || hidden < 1) throw std::invalid_argument("PolicyNet: bad dims");
}

PolicyNet PolicyNet::random_init(int n0, int hidden, std::mt19937_64& rng,
                                 double scale) {
  PolicyNet net(n0, hidden);
  std::normal_distribution<double> dist(0.0, scale);
  for (int i = 0; i < hidden; ++i) {
    for (int j = 0; j < n0; ++j) net.w1_(i, j) = dist(rng);
    net.b1_[i] = dist(rng);
  }
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < hidden; ++j) net.w2_(i, j) = dist(rng);
    net.b2_[i] = dist(rng);
  }
  return net;
}

int PolicyNet::n_params() const {
  return hidden_ * n0_ + hidden_ + n0_ * hidden_ + n0_;
}

namespace {

Vector sigmoid(const Vector& a) {
  Vector out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-a[i]));
  return out;
}

}  // namespace

Vector PolicyNet::forward(const Vector& z) const {
  return w2_ * sigmoid(w1_ * z + b1_) + b2_;
}

Vector PolicyNet::backward(const Vector& z, const Vector& v) const {
  const Vector h = sigmoid(w1_ * z + b1_);
  // d(v' m)/d params with m = W2 h + b2.
  const Vector db2 = v;
  const Matrix dw2 = v * h.transpose();
  const Vector r = (w2_.transpose() * v).cwiseProduct(h).cwiseProduct(Vector::Ones(hidden_) - h);
  const Vector db1 = r;
  const Matrix dw1 = r * z.transpose();

  Vector grad(n_params());
  int at = 0;
  for (int i = 0; i < hidden_; ++i)
    for (int j = 0; j < n0_; ++j) grad[at++] = dw1(i, j);
  for (int i = 0; i < hidden_; ++i) grad[at++] = db1[i];
  for (int i = 0; i < n0_; ++i)
    for (int j = 0; j < hidden_; ++j) grad[at++] = dw2(i, j);
  for (int i = 0; i < n0_; ++i) grad[at++] = db2[i];
  return grad;
}

Vector PolicyNet::flatten() const {
  Vector theta(n_params());
  int at = 0;
  for (int i = 0; i < hidden_; ++i)
    for (int j = 0; j < n0_; ++j) theta[at++] = w1_(i, j);
  for (int i = 0; i < hidden_; ++i) theta[at++] = b1_[i];
  for (int i = 0; i < n0_; ++i)
    for (int j = 0; j < hidden_; ++j) theta[at++] = w2_(i, j);
  for (int i = 0; i < n0_; ++i) theta[at++] = b2_[i];
  return theta;
}

void PolicyNet::assign(const Vector& theta) {
  if (theta.size() != n_params()) throw std::invalid_argument("PolicyNet: bad theta size");
  int at = 0;
  for (int i = 0; i < hidden_; ++i)
    for (int j = 0; j < n0_; ++j) w1_(i, j) = theta[at++];
  for (int i = 0; i < hidden_; ++i) b1_[i] = theta[at++];
  for (int i = 0; i < n0_; ++i)
    for (int j = 0; j < hidden_; ++j) w2_(i, j) = theta[at++];
  for (int i = 0; i < n0_; ++i) b2_[i] = theta[at++];
}

std::string PolicyNet::to_json_string() const {
  nlohmann::json j;
  j["format"] = "policy-net";
  j["version"] = 1;
  j["n0"] = n0_;
  j["hidden"] = hidden_;
  const Vector theta = flatten();
  j["weights"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  return j.dump(2);
}

PolicyNet PolicyNet::from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "policy-net") {
    throw std::runtime_error("PolicyNet: unexpected format tag");
  }
  if (j.value("version", 0) != 1) {
    throw std::runtime_error("PolicyNet: unsupported version");
  }
  PolicyNet net(j.at("n0").get<int>(), j.at("hidden").get<int>());
  const auto weights = j.at("weights").get<std::vector<double>>();
  net.assign(Eigen::Map<const Vector>(weights.data(), weights.size()));
  return net;
}

void PolicyNet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("PolicyNet: cannot write " + path);
  out << to_json_string() << "\n";
}

PolicyNet PolicyNet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("PolicyNet: cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

bool PolicyNet::operator==(const PolicyNet& other) const {
  return n0_ == other.n0_ && hidden_ == other.hidden_ &&
         flatten() == other.flatten();
}

namespace {

Vector abs_scores(const EscapeStateBuffer& buffer) {
  Vector z(buffer.size());
  for (int i = 0; i < buffer.size(); ++i) z[i] = -std::abs(buffer.score(i));
  return z;
}

Matrix buffer_dirs(const EscapeStateBuffer& buffer) {
  const int n = static_cast<int>(buffer.direction(0).size());
  Matrix d(n, buffer.size());
  for (int i = 0; i < buffer.size(); ++i) d.col(i) = buffer.direction(i);
  return d;
}

}  // namespace

Vector policy_mean(const EscapeStateBuffer& buffer, const PolicyNet& net) {
  if (!buffer.full()) throw std::invalid_argument("policy_mean: buffer not full");
  const Vector z = abs_scores(buffer);
  const Vector w = z + net.forward(z);
  return buffer_dirs(buffer) * w;
}

Vector sample_direction_learned(const EscapeStateBuffer& buffer, const PolicyNet& net,
                                double sigma, std::mt19937_64& rng,
                                Vector* pre_norm) {
  const Vector phi = policy_mean(buffer, net);
  const int n = static_cast<int>(phi.size());
  for (int tries = 0; tries < 100; ++tries) {
    const Vector action = phi + gaussian_vector(rng, n, sigma);
    const double norm = action.norm();
    if (norm > 1e-12) {
      if (pre_norm) *pre_norm = action;
      return action / norm;
    }
    if (sigma == 0.0) break;
  }
  const Vector fallback = random_unit_vector(rng, n);
  if (pre_norm) *pre_norm = fallback;
  return fallback;
}

DirectionSampler make_learned_sampler(const PolicyNet& net, double sigma) {
  return [net, sigma](const EscapeStateBuffer& buffer, std::mt19937_64& rng,
                      Vector* pre_norm) {
    return sample_direction_learned(buffer, net, sigma, rng, pre_norm);
  };
}

std::vector<double> reward_sequence(const std::vector<bool>& success_flags,
                                    double gamma) {
  std::vector<double> rewards(success_flags.size(), 0.0);
  for (std::size_t t = 0; t < success_flags.size(); ++t) {
    if (success_flags[t]) {
      rewards[t] = std::pow(gamma, std::max<std::size_t>(t, 1));
      break;  // only the first success is rewarded
    }
  }
  return rewards;
}

double Trajectory::total_reward() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.reward;
  return sum;
}

void RLConfig::validate() const {
  if (N0 < 1 || P < 1 || N_T < 1 || E < 0 || sigma <= 0 || beta <= 0 ||
      hidden < 1) {
    throw std::invalid_argument("RLConfig: non-positive field");
  }
  if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("RLConfig: gamma not in (0,1)");
}

PolicyNet policy_gradient_update(const std::vector<Trajectory>& trajectories,
                                 const PolicyNet& net, double beta, double sigma,
                                 bool paper_literal, bool* skipped) {
  if (trajectories.empty()) {
    throw std::invalid_argument("policy_gradient_update: no trajectories");
  }
  Vector delta = Vector::Zero(net.n_params());
  for (const auto& traj : trajectories) {
    const double total = traj.total_reward();
    if (total == 0.0) continue;
    for (const auto& step : traj.steps) {
      // d phi / d theta contracted against the action residual; phi = D w
      // with w = z + net(z), so the contraction against the net output is
      // through D.
      Vector residual = paper_literal ? Vector(step.phi - step.d_tilde)
                                      : Vector((step.d_tilde - step.phi) / (sigma * sigma));
      const Vector v = step.dirs.transpose() * residual;
      delta += net.backward(step.z, v) * total;
    }
  }
  if (!delta.allFinite()) {
    if (skipped) *skipped = true;
    return net;
  }
  if (skipped) *skipped = false;
  PolicyNet out = net;
  out.assign(out.flatten() + beta * delta);
  return out;
}

Trajectory rollout_learned(const Objective& f, const Vector& x0,
                           const EscapeConfig& cfg, const PolicyNet& net,
                           const RLConfig& rl, ScorerKind scorer,
                           std::mt19937_64& rng) {
  Trajectory traj;
  EscapeStateBuffer buffer(rl.N0);
  const int n = static_cast<int>(x0.size());
  for (int i = 0; i < rl.N0; ++i) {
    const Vector d = random_unit_vector(rng, n);
    buffer.push(d, score_direction(f, x0, d, cfg, scorer).u);
  }
  std::vector<bool> successes;
  for (int t = 0; t < rl.P; ++t) {
    TrajectoryStep step;
    step.z = abs_scores(buffer);
    step.dirs = buffer_dirs(buffer);
    step.phi = policy_mean(buffer, net);
    const Vector d = sample_direction_learned(buffer, net, rl.sigma, rng, &step.d_tilde);
    const DirectionScore score = score_direction(f, x0, d, cfg, scorer);
    successes.push_back(score.u > 0.0);
    buffer.push(d, score.u);
    traj.steps.push_back(std::move(step));
  }
  const auto rewards = reward_sequence(successes, rl.gamma);
  for (int t = 0; t < rl.P; ++t) traj.steps[t].reward = rewards[t];
  return traj;
}

PolicyTrainResult train_policy(const Objective& f, const Vector& x0,
                               const EscapeConfig& escape_cfg, const RLConfig& rl,
                               ScorerKind scorer, std::uint64_t seed) {
  rl.validate();
  auto init_rng = make_rng(seed, 0x9017);
  PolicyTrainResult result;
  result.net = PolicyNet::random_init(rl.N0, rl.hidden, init_rng);

  EscapeConfig cfg = escape_cfg;
  cfg.N0 = rl.N0;
  cfg.P = rl.P;
  cfg.sigma = rl.sigma;

  for (int epoch = 0; epoch < rl.E; ++epoch) {
    std::vector<Trajectory> trajectories(rl.N_T);
    parallel_for(
        static_cast<std::size_t>(rl.N_T),
        [&](std::size_t m) {
          auto rng = make_rng(seed, static_cast<std::uint64_t>(epoch) + 1, m);
          trajectories[m] = rollout_learned(f, x0, cfg, result.net, rl, scorer, rng);
        },
        rl.exec);
    double mean_reward = 0.0;
    for (const auto& t : trajectories) mean_reward += t.total_reward();
    result.epoch_mean_reward.push_back(mean_reward / rl.N_T);
    result.net = policy_gradient_update(trajectories, result.net, rl.beta, rl.sigma,
                                        rl.paper_literal_gradient);
  }
  return result;
}

}  // namespace l2go
