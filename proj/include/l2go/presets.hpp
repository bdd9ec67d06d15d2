#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "l2go/core.hpp"
#include "l2go/functions.hpp"

namespace l2go {

/// Gaussian-mixture settings used for policy training, orders 1..9
/// (orders 1-4 are 2-d, 5-9 are 5-d). Weights are 1.
GaussianMixtureConfig appendix_d_config(int order);

/// Two-minimizer evaluation mixtures (identity-like covariances), dim 2 or 5.
GaussianMixtureConfig appendix_d_test_config(int dim);

std::vector<std::string> preset_names();

/// Builds a named objective. The seed feeds data synthesis (robust
/// regression, classifier); analytic presets ignore it.
ObjectivePtr make_preset(const std::string& name, std::uint64_t seed);

/// Builds an objective from a config object. Keys: family (gaussian_mixture
/// | gaussian | chi_square_2d | three_hump | quadratic | robust_regression |
/// small_classifier | preset), plus family-specific fields: dim, centers,
/// cov_diag, weights, k, seed, name.
ObjectivePtr objective_from_config(const nlohmann::json& config,
                                   std::uint64_t default_seed = 0);

}  // namespace l2go
