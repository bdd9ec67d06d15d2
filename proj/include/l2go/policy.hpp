#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "l2go/core.hpp"
#include "l2go/escape.hpp"
#include "l2go/parallel.hpp"

namespace l2go {

/// Feed-forward coefficient network: N0 -> hidden (sigmoid) -> N0 (linear).
/// Maps the buffer's -|u| vector to coefficient adjustments.
class PolicyNet {
 public:
  PolicyNet() = default;
  PolicyNet(int n0, int hidden);

  static PolicyNet random_init(int n0, int hidden, std::mt19937_64& rng,
                               double scale = 0.1);

  int n0() const { return n0_; }
  int hidden() const { return hidden_; }
  int n_params() const;

  Vector forward(const Vector& z) const;

  /// Gradient of v' forward(z) with respect to the flattened parameters.
  Vector backward(const Vector& z, const Vector& v) const;

  Vector flatten() const;
  void assign(const Vector& theta);

  std::string to_json_string() const;
  static PolicyNet from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static PolicyNet load(const std::string& path);

  bool operator==(const PolicyNet& other) const;

 private:
  int n0_ = 0;
  int hidden_ = 0;
  Matrix w1_;  // hidden x n0
  Vector b1_;  // hidden
  Matrix w2_;  // n0 x hidden
  Vector b2_;  // n0
};

/// phi = sum_i w_i d_i with w = -|u| + net(-|u|); the policy's action mean.
Vector policy_mean(const EscapeStateBuffer& buffer, const PolicyNet& net);

/// d~ = phi + eps with eps ~ N(0, sigma^2 I), normalized to unit length.
/// When pre_norm is given it receives the raw action phi + eps.
Vector sample_direction_learned(const EscapeStateBuffer& buffer, const PolicyNet& net,
                                double sigma, std::mt19937_64& rng,
                                Vector* pre_norm = nullptr);

DirectionSampler make_learned_sampler(const PolicyNet& net, double sigma);

/// Discounted one-success rewards: the first success at step t (0-based)
/// earns gamma^max(t,1); every other entry is zero.
std::vector<double> reward_sequence(const std::vector<bool>& success_flags,
                                    double gamma);

/// One rollout step retained for the gradient update.
struct TrajectoryStep {
  Vector d_tilde;  // pre-normalization action
  Vector phi;      // action mean at the time
  double reward = 0.0;
  Vector z;        // -|u| buffer vector fed to the net
  Matrix dirs;     // buffer directions as columns (n x N0)
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double total_reward() const;
};

struct RLConfig {
  int N0 = 2;
  int P = 15;
  int N_T = 20;        // trajectories per epoch
  int E = 30;          // epochs
  double sigma = 0.1;
  double beta = 0.005;  // policy learning rate
  double gamma = 0.9;
  int hidden = 5;
  bool paper_literal_gradient = false;  // (phi - d~) without the 1/sigma^2 scale
  Exec exec = Exec::parallel;

  void validate() const;
};

/// REINFORCE update: delta = sum_m sum_t J'((d~ - phi)/sigma^2) R_m and
/// theta <- theta + beta delta (the score-function ascent form; the
/// paper-literal flag uses (phi - d~) unscaled). Non-finite deltas skip the
/// update and set the flag.
PolicyNet policy_gradient_update(const std::vector<Trajectory>& trajectories,
                                 const PolicyNet& net, double beta, double sigma,
                                 bool paper_literal = false,
                                 bool* skipped = nullptr);

struct PolicyTrainResult {
  PolicyNet net;
  std::vector<double> epoch_mean_reward;
};

/// Runs one rollout of the learned policy from x0 and returns the recorded
/// trajectory (used by training; escape_session covers evaluation).
Trajectory rollout_learned(const Objective& f, const Vector& x0,
                           const EscapeConfig& cfg, const PolicyNet& net,
                           const RLConfig& rl, ScorerKind scorer,
                           std::mt19937_64& rng);

/// Policy-gradient training (E epochs of N_T rollouts each). The returned
/// net is the random init when E = 0. Bit-reproducible for a fixed seed.
PolicyTrainResult train_policy(const Objective& f, const Vector& x0,
                               const EscapeConfig& escape_cfg, const RLConfig& rl,
                               ScorerKind scorer, std::uint64_t seed);

}  // namespace l2go
