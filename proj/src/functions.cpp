#include "l2go/functions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "l2go/rng.hpp"

namespace l2go {

GaussianObjective::GaussianObjective(Matrix sigma_inv)
    : sigma_inv_(std::move(sigma_inv)) {
  if (sigma_inv_.rows() != sigma_inv_.cols()) {
    throw std::invalid_argument("GaussianObjective: sigma_inv not square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_inv_);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("GaussianObjective: sigma_inv not PSD");
  }
}

double GaussianObjective::value(const Vector& x) const {
  return -std::exp(-x.dot(sigma_inv_ * x));
}

Vector GaussianObjective::gradient(const Vector& x) const {
  const double q = x.dot(sigma_inv_ * x);
  return std::exp(-q) * 2.0 * (sigma_inv_ * x);
}

std::shared_ptr<GaussianObjective> sample_gaussian_family(std::mt19937_64& rng,
                                                          int n, double cond_lo,
                                                          double cond_hi) {
  if (n < 1) throw std::invalid_argument("sample_gaussian_family: n < 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cond = cond_lo * std::pow(cond_hi / cond_lo, unit(rng));
  const double lo = 1.0 / std::sqrt(cond);
  Vector eigs(n);
  eigs[0] = lo;
  if (n > 1) eigs[n - 1] = lo * cond;
  for (int i = 1; i + 1 < n; ++i) eigs[i] = lo * std::pow(cond, unit(rng));

  // Random orthogonal basis from the QR of a Gaussian matrix.
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = gaussian_vector(rng, 1)[0];
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix a = q * eigs.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  return std::make_shared<GaussianObjective>(std::move(a));
}

GaussianMixtureObjective::GaussianMixtureObjective(GaussianMixtureConfig config)
    : config_(std::move(config)) {
  const std::size_t m = config_.weights.size();
  if (m == 0 || config_.centers.size() != m || config_.sigma_invs.size() != m) {
    throw std::invalid_argument("GaussianMixtureObjective: inconsistent sizes");
  }
  for (double c : config_.weights) {
    if (c <= 0.0) throw std::invalid_argument("GaussianMixtureObjective: weight <= 0");
  }
}

double GaussianMixtureObjective::value(const Vector& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < config_.weights.size(); ++i) {
    const Vector r = x - config_.centers[i];
    sum += config_.weights[i] * std::exp(-r.dot(config_.sigma_invs[i] * r));
  }
  return -sum;
}

Vector GaussianMixtureObjective::gradient(const Vector& x) const {
  Vector g = Vector::Zero(x.size());
  for (std::size_t i = 0; i < config_.weights.size(); ++i) {
    const Vector r = x - config_.centers[i];
    const Vector ar = config_.sigma_invs[i] * r;
    g += config_.weights[i] * std::exp(-r.dot(ar)) * 2.0 * ar;
  }
  return g;
}

std::shared_ptr<GaussianMixtureObjective> gaussian_mixture(GaussianMixtureConfig config) {
  return std::make_shared<GaussianMixtureObjective>(std::move(config));
}

std::shared_ptr<GaussianMixtureObjective> gaussian_mixture_diag(
    const std::vector<double>& weights, const std::vector<Vector>& centers,
    const std::vector<Vector>& cov_diagonals) {
  GaussianMixtureConfig config;
  config.weights = weights;
  config.centers = centers;
  for (const Vector& d : cov_diagonals) {
    config.sigma_invs.push_back(d.cwiseInverse().asDiagonal());
  }
  return gaussian_mixture(std::move(config));
}

ChiSquareObjective::ChiSquareObjective(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("ChiSquareObjective: k < 1");
  log_norm_ = 0.5 * k * std::log(2.0) + std::lgamma(0.5 * k);
}

double ChiSquareObjective::value(const Vector& x) const {
  const double t = x[0];
  if (t <= 0.0) throw std::domain_error("chi_square: x <= 0");
  return std::exp((0.5 * k_ - 1.0) * std::log(t) - 0.5 * t - log_norm_);
}

Vector ChiSquareObjective::gradient(const Vector& x) const {
  const double t = x[0];
  if (t <= 0.0) throw std::domain_error("chi_square: x <= 0");
  Vector g(1);
  g[0] = value(x) * ((0.5 * k_ - 1.0) / t - 0.5);
  return g;
}

std::shared_ptr<ChiSquareObjective> chi_square(int k) {
  return std::make_shared<ChiSquareObjective>(k);
}

namespace {

class ChiSquare2d final : public Objective {
 public:
  explicit ChiSquare2d(int k) : density_(k) {}

  int dim() const override { return 2; }

  double value(const Vector& x) const override {
    return -density(x[0]) * density(x[1]);
  }

  Vector gradient(const Vector& x) const override {
    Vector g(2);
    g[0] = -ddensity(x[0]) * density(x[1]);
    g[1] = -density(x[0]) * ddensity(x[1]);
    return g;
  }

 private:
  static double clamp(double t) { return t < 1e-8 ? 1e-8 : t; }
  double density(double t) const {
    Vector v(1);
    v[0] = clamp(t);
    return density_.value(v);
  }
  double ddensity(double t) const {
    if (t < 1e-8) return 0.0;  // clamped region is flat
    Vector v(1);
    v[0] = t;
    return density_.gradient(v)[0];
  }

  ChiSquareObjective density_;
};

class ThreeHump final : public Objective {
 public:
  int dim() const override { return 2; }

  double value(const Vector& x) const override {
    const double x1 = x[0], x2 = x[1];
    const double x1sq = x1 * x1;
    return 2.0 * x1sq - 1.05 * x1sq * x1sq + x1sq * x1sq * x1sq / 6.0 -
           x1 * x2 + x2 * x2;
  }

  Vector gradient(const Vector& x) const override {
    const double x1 = x[0], x2 = x[1];
    Vector g(2);
    g[0] = 4.0 * x1 - 4.2 * x1 * x1 * x1 + std::pow(x1, 5) - x2;
    g[1] = -x1 + 2.0 * x2;
    return g;
  }
};

}  // namespace

std::shared_ptr<Objective> chi_square_2d(int k) {
  return std::make_shared<ChiSquare2d>(k);
}

std::shared_ptr<Objective> three_hump() { return std::make_shared<ThreeHump>(); }

RobustRegressionObjective::RobustRegressionObjective(RobustRegressionProblem problem)
    : problem_(std::move(problem)) {
  if (problem_.c <= 0.0) throw std::invalid_argument("robust regression: c <= 0");
  if (problem_.features.rows() != problem_.labels.size()) {
    throw std::invalid_argument("robust regression: feature/label mismatch");
  }
}

double RobustRegressionObjective::value(const Vector& wb) const {
  const int d = static_cast<int>(problem_.features.cols());
  const Vector w = wb.head(d);
  const double b = wb[d];
  const double c2 = problem_.c * problem_.c;
  const Vector r = problem_.labels - problem_.features * w -
                   Vector::Constant(problem_.labels.size(), b);
  double sum = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    const double r2 = r[i] * r[i];
    sum += r2 / (r2 + c2);
  }
  return sum / static_cast<double>(r.size());
}

Vector RobustRegressionObjective::gradient(const Vector& wb) const {
  const int d = static_cast<int>(problem_.features.cols());
  const Vector w = wb.head(d);
  const double b = wb[d];
  const double c2 = problem_.c * problem_.c;
  const Vector r = problem_.labels - problem_.features * w -
                   Vector::Constant(problem_.labels.size(), b);
  Vector g = Vector::Zero(d + 1);
  for (int i = 0; i < r.size(); ++i) {
    const double denom = r[i] * r[i] + c2;
    const double dri = 2.0 * r[i] * c2 / (denom * denom);
    g.head(d) -= dri * problem_.features.row(i).transpose();
    g[d] -= dri;
  }
  return g / static_cast<double>(r.size());
}

std::shared_ptr<RobustRegressionObjective> make_robust_regression(
    const std::vector<PlantedRegressor>& planted, double noise_sigma, double c,
    std::mt19937_64& rng) {
  if (planted.empty()) throw std::invalid_argument("make_robust_regression: no planted optima");
  int n = 0;
  for (const auto& p : planted) n += p.count;
  const int d = static_cast<int>(planted[0].w.size());

  RobustRegressionProblem problem;
  problem.c = c;
  problem.planted = planted;
  problem.features.resize(n, d);
  problem.labels.resize(n);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  int row = 0;
  for (const auto& p : planted) {
    for (int j = 0; j < p.count; ++j, ++row) {
      const Vector x = gaussian_vector(rng, d);
      problem.features.row(row) = x.transpose();
      problem.labels[row] = p.w.dot(x) + p.b + (noise_sigma > 0.0 ? noise(rng) : 0.0);
    }
  }
  return std::make_shared<RobustRegressionObjective>(std::move(problem));
}

SmallClassifierObjective::SmallClassifierObjective(Matrix points,
                                                   std::vector<int> labels,
                                                   int batch_size,
                                                   std::uint64_t batch_seed)
    : points_(std::move(points)),
      labels_(std::move(labels)),
      batch_size_(batch_size),
      batch_seed_(batch_seed) {
  if (points_.rows() != static_cast<Eigen::Index>(labels_.size())) {
    throw std::invalid_argument("small classifier: point/label mismatch");
  }
}

std::pair<double, Vector> SmallClassifierObjective::eval_subset(
    const Vector& theta, const std::vector<int>& idx) const {
  // theta = (w1, w2, b1, v, b2): hidden unit h = sigmoid(w.x + b1),
  // prediction p = sigmoid(v h + b2), binary cross entropy.
  const double w1 = theta[0], w2 = theta[1], b1 = theta[2];
  const double v = theta[3], b2 = theta[4];
  double loss = 0.0;
  Vector grad = Vector::Zero(5);
  for (int i : idx) {
    const double a1 = w1 * points_(i, 0) + w2 * points_(i, 1) + b1;
    const double h = 1.0 / (1.0 + std::exp(-a1));
    const double a2 = v * h + b2;
    const double p = 1.0 / (1.0 + std::exp(-a2));
    const double y = static_cast<double>(labels_[i]);
    const double eps = 1e-12;
    loss -= y * std::log(p + eps) + (1.0 - y) * std::log(1.0 - p + eps);
    const double dl_da2 = p - y;
    const double dl_dh = dl_da2 * v;
    const double dl_da1 = dl_dh * h * (1.0 - h);
    grad[0] += dl_da1 * points_(i, 0);
    grad[1] += dl_da1 * points_(i, 1);
    grad[2] += dl_da1;
    grad[3] += dl_da2 * h;
    grad[4] += dl_da2;
  }
  const double inv = 1.0 / static_cast<double>(idx.size());
  return {loss * inv, grad * inv};
}

double SmallClassifierObjective::value(const Vector& theta) const {
  std::vector<int> all(n_samples());
  for (int i = 0; i < n_samples(); ++i) all[i] = i;
  return eval_subset(theta, all).first;
}

Vector SmallClassifierObjective::gradient(const Vector& theta) const {
  std::vector<int> all(n_samples());
  for (int i = 0; i < n_samples(); ++i) all[i] = i;
  return eval_subset(theta, all).second;
}

std::pair<double, Vector> SmallClassifierObjective::batch_value_grad(
    const Vector& theta, std::uint64_t batch_id) const {
  auto rng = make_rng(batch_seed_, batch_id);
  std::uniform_int_distribution<int> pick(0, n_samples() - 1);
  std::vector<int> idx(batch_size_);
  for (int j = 0; j < batch_size_; ++j) idx[j] = pick(rng);
  return eval_subset(theta, idx);
}

std::shared_ptr<SmallClassifierObjective> small_classifier(const Vector& x1,
                                                           const Vector& x2,
                                                           double sigma,
                                                           std::mt19937_64& rng,
                                                           int n_per_class,
                                                           int batch_size) {
  if ((x1 - x2).norm() == 0.0) {
    throw std::invalid_argument("small_classifier: x1 == x2");
  }
  const int n = 2 * n_per_class;
  Matrix points(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n_per_class; ++i) {
    points.row(i) = (x1 + gaussian_vector(rng, 2, sigma)).transpose();
    labels[i] = 0;
    points.row(n_per_class + i) = (x2 + gaussian_vector(rng, 2, sigma)).transpose();
    labels[n_per_class + i] = 1;
  }
  const std::uint64_t batch_seed = rng();
  return std::make_shared<SmallClassifierObjective>(std::move(points), std::move(labels),
                                                    batch_size, batch_seed);
}

}  // namespace l2go
