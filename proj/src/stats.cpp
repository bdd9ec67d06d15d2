#include "l2go/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace l2go {
namespace {

// Midranks of the pooled sample; ranks start at 1.
std::vector<double> midranks(std::vector<double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double exact_p(const std::vector<double>& ranks, std::size_t n_a) {
  const std::size_t n = ranks.size();
  double w_obs = 0.0;
  for (std::size_t i = 0; i < n_a; ++i) w_obs += ranks[i];

  // Enumerate all subsets of size n_a; counts how many have rank sum at or
  // beyond the observed one on each side.
  std::vector<std::size_t> idx(n_a);
  for (std::size_t i = 0; i < n_a; ++i) idx[i] = i;
  long long total = 0, le = 0, ge = 0;
  const double tol = 1e-12;
  for (;;) {
    double w = 0.0;
    for (std::size_t i : idx) w += ranks[i];
    ++total;
    if (w <= w_obs + tol) ++le;
    if (w >= w_obs - tol) ++ge;
    // next combination
    std::size_t k = n_a;
    while (k > 0) {
      --k;
      if (idx[k] != k + n - n_a) {
        ++idx[k];
        for (std::size_t j = k + 1; j < n_a; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (k == 0) {
        const double p_le = static_cast<double>(le) / total;
        const double p_ge = static_cast<double>(ge) / total;
        return std::min(1.0, 2.0 * std::min(p_le, p_ge));
      }
    }
  }
}

}  // namespace

double rank_sum_test(const std::vector<double>& sample_a,
                     const std::vector<double>& sample_b) {
  if (sample_a.empty() || sample_b.empty()) {
    throw std::invalid_argument("rank_sum_test: empty sample");
  }
  const std::size_t n_a = sample_a.size();
  const std::size_t n_b = sample_b.size();
  std::vector<double> pooled = sample_a;
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());

  bool all_same = true;
  for (double v : pooled) all_same = all_same && v == pooled[0];
  if (all_same) return 1.0;

  const std::vector<double> ranks = midranks(pooled);
  if (n_a <= 10 && n_b <= 10) return exact_p(ranks, n_a);

  double w = 0.0;
  for (std::size_t i = 0; i < n_a; ++i) w += ranks[i];
  const double n = static_cast<double>(n_a + n_b);
  const double mean = n_a * (n + 1.0) / 2.0;

  // Tie correction over pooled value multiplicities.
  std::map<double, long long> counts;
  for (double v : pooled) ++counts[v];
  double tie_sum = 0.0;
  for (const auto& [value, t] : counts) {
    (void)value;
    tie_sum += static_cast<double>(t) * t * t - t;
  }
  const double var = (static_cast<double>(n_a) * n_b / 12.0) *
                     ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  double z = w - mean;
  z -= (z > 0 ? 0.5 : (z < 0 ? -0.5 : 0.0));  // continuity correction
  z /= std::sqrt(var);
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return std::min(1.0, p);
}

StatSummary summarize(const std::vector<double>& samples) {
  StatSummary s;
  s.n_runs = static_cast<int>(samples.size());
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / samples.size();
  double sq = 0.0;
  for (double v : samples) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = samples.size() > 1 ? std::sqrt(sq / (samples.size() - 1)) : 0.0;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid]
                                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

}  // namespace l2go
