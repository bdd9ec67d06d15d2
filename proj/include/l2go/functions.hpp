#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "l2go/core.hpp"

namespace l2go {

/// f(x) = -exp(-x' Sinv x) with Sinv symmetric PSD. Minimizer at 0 with
/// f(0) = -1 (the family is negated so descent heads to the minimum).
class GaussianObjective final : public Objective {
 public:
  explicit GaussianObjective(Matrix sigma_inv);

  int dim() const override { return static_cast<int>(sigma_inv_.rows()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  const Matrix& sigma_inv() const { return sigma_inv_; }

 private:
  Matrix sigma_inv_;
};

/// Draws a Gaussian-family objective with a random PSD Sinv whose condition
/// number lies in [cond_lo, cond_hi]; eigenvalues are spread geometrically
/// around 1.
std::shared_ptr<GaussianObjective> sample_gaussian_family(std::mt19937_64& rng,
                                                          int n, double cond_lo,
                                                          double cond_hi);

struct GaussianMixtureConfig {
  std::vector<double> weights;          // c_i > 0
  std::vector<Vector> centers;          // mu_i
  std::vector<Matrix> sigma_invs;       // PSD per component
};

/// f(x) = -sum_i c_i exp(-(x - mu_i)' Sinv_i (x - mu_i)); local minimizers
/// sit near each mu_i.
class GaussianMixtureObjective final : public Objective {
 public:
  explicit GaussianMixtureObjective(GaussianMixtureConfig config);

  int dim() const override { return static_cast<int>(config_.centers[0].size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  const GaussianMixtureConfig& config() const { return config_; }

 private:
  GaussianMixtureConfig config_;
};

std::shared_ptr<GaussianMixtureObjective> gaussian_mixture(GaussianMixtureConfig config);

/// Convenience for diagonal covariances: entries are the diagonals of the
/// covariance matrices Sigma_i (inverted internally).
std::shared_ptr<GaussianMixtureObjective> gaussian_mixture_diag(
    const std::vector<double>& weights, const std::vector<Vector>& centers,
    const std::vector<Vector>& cov_diagonals);

/// Chi-square density in 1-d over x > 0. Throws std::domain_error for
/// x <= 0; callers clamp to x >= 1e-8 where needed.
class ChiSquareObjective final : public Objective {
 public:
  explicit ChiSquareObjective(int k);

  int dim() const override { return 1; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  int k() const { return k_; }

 private:
  int k_;
  double log_norm_;  // log(2^(k/2) Gamma(k/2))
};

std::shared_ptr<ChiSquareObjective> chi_square(int k);

/// Separable 2-d minimization target built from the chi-square density:
/// f(x) = -p_k(x1) p_k(x2), coordinates clamped to x >= 1e-8. Minimizer at
/// (k-2, k-2) for k > 2.
std::shared_ptr<Objective> chi_square_2d(int k);

/// f(x) = 2 x1^2 - 1.05 x1^4 + x1^6/6 - x1 x2 + x2^2. Three local
/// minimizers: (0,0) (global) and approximately (+-1.7476, +-0.8738).
std::shared_ptr<Objective> three_hump();

struct PlantedRegressor {
  Vector w;
  double b = 0.0;
  int count = 0;  // samples generated from this regressor
};

struct RobustRegressionProblem {
  Matrix features;      // n_samples x d
  Vector labels;        // n_samples
  double c = 1.0;       // Geman-McClure shape constant
  std::vector<PlantedRegressor> planted;
};

/// Geman-McClure loss over (w, b): mean of r^2 / (r^2 + c^2) with
/// r = y - w'x - b. Per-sample loss lies in [0, 1).
class RobustRegressionObjective final : public Objective {
 public:
  explicit RobustRegressionObjective(RobustRegressionProblem problem);

  int dim() const override { return static_cast<int>(problem_.features.cols()) + 1; }
  double value(const Vector& wb) const override;
  Vector gradient(const Vector& wb) const override;
  const RobustRegressionProblem& problem() const { return problem_; }

 private:
  RobustRegressionProblem problem_;
};

/// Synthesizes features x_j ~ N(0, I) and labels y_j = w_i'x_j + b_i + eps
/// per planted partition, eps ~ N(0, noise_sigma^2).
std::shared_ptr<RobustRegressionObjective> make_robust_regression(
    const std::vector<PlantedRegressor>& planted, double noise_sigma, double c,
    std::mt19937_64& rng);

/// Cross-entropy loss of a one-hidden-unit network (5 parameters total:
/// hidden weights 2 + hidden bias + output weight + output bias) separating
/// two noisy point clouds in 2-d. Supports deterministic mini-batches.
class SmallClassifierObjective final : public Objective {
 public:
  SmallClassifierObjective(Matrix points, std::vector<int> labels, int batch_size,
                           std::uint64_t batch_seed);

  int dim() const override { return 5; }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  bool has_batch() const override { return true; }
  std::pair<double, Vector> batch_value_grad(const Vector& theta,
                                             std::uint64_t batch_id) const override;

  int n_samples() const { return static_cast<int>(points_.rows()); }

 private:
  std::pair<double, Vector> eval_subset(const Vector& theta,
                                        const std::vector<int>& idx) const;

  Matrix points_;  // n x 2
  std::vector<int> labels_;
  int batch_size_;
  std::uint64_t batch_seed_;
};

std::shared_ptr<SmallClassifierObjective> small_classifier(const Vector& x1,
                                                           const Vector& x2,
                                                           double sigma,
                                                           std::mt19937_64& rng,
                                                           int n_per_class = 25,
                                                           int batch_size = 8);

}  // namespace l2go
