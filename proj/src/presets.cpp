#include "l2go/presets.hpp"

#include <stdexcept>

#include "l2go/rng.hpp"

namespace l2go {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

GaussianMixtureConfig diag_mixture(const std::vector<Vector>& centers,
                                   const std::vector<Vector>& cov_diagonals,
                                   std::vector<double> weights = {}) {
  GaussianMixtureConfig config;
  config.centers = centers;
  if (weights.empty()) weights.assign(centers.size(), 1.0);
  config.weights = std::move(weights);
  for (const Vector& d : cov_diagonals) {
    config.sigma_invs.push_back(d.cwiseInverse().asDiagonal());
  }
  return config;
}

ObjectivePtr quadratic(int n) {
  return std::make_shared<FunctionObjective>(
      n, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
      [](const Vector& x) { return Vector(x); });
}

std::vector<PlantedRegressor> default_planted() {
  PlantedRegressor p1{vec({-8.0, -8.0}), 0.0, 10};
  PlantedRegressor p2{vec({5.0, 5.0}), 0.0, 40};
  return {p1, p2};
}

}  // namespace

GaussianMixtureConfig appendix_d_config(int order) {
  switch (order) {
    case 1:
      return diag_mixture({vec({0, 0}), vec({7, 7})}, {vec({1, 8}), vec({1, 3})});
    case 2:
      return diag_mixture({vec({0, 0}), vec({5, 7})}, {vec({1, 8}), vec({1, 3})});
    case 3:
      return diag_mixture({vec({0, 0}), vec({3, 7})}, {vec({1, 8}), vec({1, 3})});
    case 4:
      return diag_mixture({vec({0, 0}), vec({4, 7})}, {vec({1, 8}), vec({1, 3})});
    case 5:
      return diag_mixture({vec({0, 0, 0, 0, 0}), vec({5, 5, 5, 5, 5})},
                          {vec({1, 1, 1, 8, 8}), vec({1, 1, 1, 8, 8})});
    case 6:
      return diag_mixture({vec({0, 0, 0, 0, 0}), vec({4, 4, 5, 5, 5})},
                          {vec({1, 1, 1, 8, 8}), vec({1, 1, 1, 8, 8})});
    case 7:
      return diag_mixture({vec({0, 0, 0, 0, 0}), vec({3, 3, 5, 5, 5})},
                          {vec({1, 1, 1, 8, 8}), vec({1, 1, 1, 8, 8})});
    case 8:
      return diag_mixture({vec({0, 0, 0, 0, 0}), vec({5, 5, 5, 5, 5})},
                          {vec({1, 1, 1, 1, 1}), vec({1, 1, 1, 8, 8})});
    case 9:
      return diag_mixture({vec({0, 0, 0, 0, 0}), vec({3, 3, 5, 5, 5})},
                          {vec({1, 1, 1, 1, 1}), vec({1, 1, 1, 8, 8})});
    default:
      throw std::invalid_argument("appendix_d_config: order must be 1..9");
  }
}

GaussianMixtureConfig appendix_d_test_config(int dim) {
  if (dim == 2) {
    return diag_mixture({vec({0, 0}), vec({5, 5})}, {vec({1, 1}), vec({1, 1})});
  }
  if (dim == 5) {
    return diag_mixture({vec({0, 0, 0, 0, 0}), vec({-5, -5, -5, -5, -5})},
                        {vec({1, 1, 1, 8, 8}), vec({1, 1, 1, 8, 8})});
  }
  throw std::invalid_argument("appendix_d_test_config: dim must be 2 or 5");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names = {
      "appendix_d_test_2d", "appendix_d_test_5d", "escape_mixture_2d",
      "escape_mixture_5d",  "policy_train_2d",    "three_hump",
      "chi2_2d",            "quadratic_2d",       "quadratic_5d",
      "robust_regression",  "small_classifier"};
  for (int i = 1; i <= 9; ++i) names.push_back("appendix_d_" + std::to_string(i));
  return names;
}

ObjectivePtr make_preset(const std::string& name, std::uint64_t seed) {
  if (name.rfind("appendix_d_", 0) == 0) {
    const std::string tail = name.substr(11);
    if (tail == "test_2d") return gaussian_mixture(appendix_d_test_config(2));
    if (tail == "test_5d") return gaussian_mixture(appendix_d_test_config(5));
    const int order = std::stoi(tail);
    return gaussian_mixture(appendix_d_config(order));
  }
  if (name == "escape_mixture_2d") {
    // Two-minimizer escape benchmark landscape: a local minimum inside a
    // wide bowl at the origin, next to a deeper valley elongated across the
    // inter-minimum axis.
    return gaussian_mixture(diag_mixture({vec({0, 0}), vec({4, 0})},
                                         {vec({6, 6}), vec({1.5, 25})}, {1.0, 2.0}));
  }
  if (name == "escape_mixture_5d") {
    return gaussian_mixture(diag_mixture(
        {vec({0, 0, 0, 0, 0}), vec({4, 0, 0, 0, 0})},
        {vec({6, 6, 6, 6, 6}), vec({1.5, 25, 25, 25, 25})}, {1.0, 2.0}));
  }
  if (name == "policy_train_2d") {
    // Same family as escape_mixture_2d with a flipped axis and different
    // depths/widths; used to train the escaping policy off the evaluation
    // landscape.
    return gaussian_mixture(diag_mixture({vec({0, 0}), vec({-3.8, 0})},
                                         {vec({5, 5}), vec({1.8, 18})}, {1.0, 2.2}));
  }
  if (name == "three_hump") return three_hump();
  if (name == "chi2_2d") return chi_square_2d(4);
  if (name == "quadratic_2d") return quadratic(2);
  if (name == "quadratic_5d") return quadratic(5);
  if (name == "robust_regression") {
    auto rng = make_rng(seed, 0x70b0);
    return make_robust_regression(default_planted(), 0.1, 1.0, rng);
  }
  if (name == "small_classifier") {
    auto rng = make_rng(seed, 0xc1a5);
    return small_classifier(vec({-1.0, -1.0}), vec({1.0, 1.0}), 0.3, rng);
  }
  throw std::invalid_argument("unknown preset: " + name);
}

ObjectivePtr objective_from_config(const nlohmann::json& config,
                                   std::uint64_t default_seed) {
  const std::uint64_t seed = config.value("seed", default_seed);
  const std::string family = config.value("family", "preset");
  if (family == "preset") {
    return make_preset(config.at("name").get<std::string>(), seed);
  }
  if (family == "gaussian_mixture") {
    std::vector<Vector> centers;
    for (const auto& c : config.at("centers")) {
      centers.push_back(Eigen::Map<const Vector>(c.get<std::vector<double>>().data(),
                                                 c.size()));
    }
    std::vector<Vector> cov;
    for (const auto& c : config.at("cov_diag")) {
      cov.push_back(Eigen::Map<const Vector>(c.get<std::vector<double>>().data(),
                                             c.size()));
    }
    std::vector<double> weights =
        config.value("weights", std::vector<double>(centers.size(), 1.0));
    return gaussian_mixture_diag(weights, centers, cov);
  }
  if (family == "gaussian") {
    const int dim = config.at("dim").get<int>();
    auto rng = make_rng(seed, 0x6a05);
    return sample_gaussian_family(rng, dim, config.value("cond_lo", 2.0),
                                  config.value("cond_hi", 20.0));
  }
  if (family == "chi_square_2d") return chi_square_2d(config.value("k", 4));
  if (family == "three_hump") return three_hump();
  if (family == "quadratic") return quadratic(config.value("dim", 2));
  if (family == "robust_regression") {
    auto rng = make_rng(seed, 0x70b0);
    return make_robust_regression(default_planted(), config.value("noise_sigma", 0.1),
                                  config.value("c", 1.0), rng);
  }
  if (family == "small_classifier") {
    auto rng = make_rng(seed, 0xc1a5);
    return small_classifier(vec({-1.0, -1.0}), vec({1.0, 1.0}),
                            config.value("sigma", 0.3), rng);
  }
  throw std::invalid_argument("unknown objective family: " + family);
}

}  // namespace l2go
