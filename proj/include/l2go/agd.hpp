#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "l2go/core.hpp"
#include "l2go/parallel.hpp"
#include "l2go/trace.hpp"

namespace l2go {

/// Per-layer direction parameters {w1..w4, beta}.
struct ThetaLayer {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 1.0;
  double w4 = 0.0;
  double beta = 0.5;
};

/// A T-layer stack of direction parameters. Layers 0 and 1 drive the two
/// warm-up steps (layer 0 carries no active parameters, layer 1 uses only
/// the w's); layers 2..T-1 drive the adaptive-direction steps.
struct DNetParams {
  std::vector<ThetaLayer> layers;
  double rho = 1.0;

  int T() const { return static_cast<int>(layers.size()); }
  static DNetParams defaults(int T);

  std::string to_json_string() const;
  static DNetParams from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static DNetParams load(const std::string& path);
};

/// Rolling state of one AGD run: iterate, current/previous gradients, the
/// last two steps, and the running R*H product.
struct AgdState {
  Vector x;
  Vector g;
  Vector g_prev;
  Vector s_prev;
  Vector s_prev2;
  Vector y_prev2;
  Matrix RH;
  int k = 0;
};

/// R = I - s (w1 g - w2 g_prev)' / (s' (w3 g - w4 g_prev)). Falls back to I
/// when the denominator is negligible relative to |s| |w3 g - w4 g_prev|.
Matrix compute_R(const Vector& s, const Vector& g, const Vector& g_prev,
                 const ThetaLayer& layer);

/// RH_new = R (RH_old + rho s2 s2' / (s2' y2)) with R built from the current
/// step; the rank-one term is dropped when s2'y2 degenerates.
Matrix update_RH(const AgdState& state, const ThetaLayer& layer, double rho);

/// d = -R (beta H + (1 - beta) I) g evaluated through the stored RH product.
/// If g'd >= 0 the beta is halved (up to 20 times) until descent holds,
/// with -g as the final fallback, so the result is always a descent
/// direction.
Vector agd_direction(const AgdState& state, const ThetaLayer& layer);

/// Full adaptive-descent run: one steepest warm-up step, one R0 H0 step,
/// then the adaptive-direction loop, each with exact line search. Stops at
/// |g| <= eps or max_iter. Iterations beyond the layer stack reuse the last
/// layer.
RunTrace agd_run(const Objective& f, const Vector& x0, const DNetParams& params,
                 double eps, int max_iter);

/// Exactly T line-search steps of the AGD body with no early stop; used as
/// one network block during training.
RunTrace dnet_apply(const DNetParams& params, const Objective& f, const Vector& x0);

/// Chains parameter-shared d-Net blocks, each starting from the previous
/// block's final iterate, until |g| <= eps or the block budget runs out.
RunTrace gdnet_run(const DNetParams& params, const Objective& f, const Vector& x0,
                   double eps, int max_blocks = 50);

/// Sum of trace criteria from iterate 2 through T (the training loss
/// contribution of one run; the warm-up term at t = 1 is excluded).
double dnet_loss_contribution(const RunTrace& trace);

struct DNetTrainConfig {
  int T = 10;
  double rho = 1.0;
  double lr = 0.1;
  int epochs = 100;
  double fd_step = 1e-5;  // central-difference step on theta
  Exec exec = Exec::parallel;
};

struct DNetTrainResult {
  DNetParams params;
  std::vector<double> loss_history;  // epochs + 1 entries, entry 0 at init
};

/// One task of the Monte-Carlo training loss: a function paired with an
/// initial point.
struct TrainingCase {
  ObjectivePtr f;
  Vector x0;
};

/// Mean d-Net loss over the cases for the given parameters.
double dnet_loss(const std::vector<TrainingCase>& cases, const DNetParams& params,
                 Exec exec = Exec::parallel);

/// Minimizes the Monte-Carlo loss by gradient descent on theta with
/// central-difference gradients (the inner exact line search is treated as
/// a non-differentiable solve and re-run per probe). beta is clamped to
/// [0,1] after every step. If the loss is non-finite at the initial theta,
/// the layers are re-drawn from rng.
DNetTrainResult train_dnet(const std::vector<TrainingCase>& cases,
                           const DNetTrainConfig& config, std::mt19937_64& rng);

/// Samples n_functions Gaussian-family objectives and n_inits starting
/// points (uniform in [-init_range, init_range]^dim) per function.
std::vector<TrainingCase> make_gaussian_training_set(std::mt19937_64& rng,
                                                     int n_functions, int n_inits,
                                                     int dim, double cond_lo,
                                                     double cond_hi,
                                                     double init_range);

}  // namespace l2go
