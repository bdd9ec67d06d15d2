#pragma once

#include <vector>

namespace l2go {

/// Two-sided Wilcoxon rank-sum p-value. Exact enumeration of rank
/// assignments when both samples have at most 10 entries, otherwise the
/// normal approximation with midranks, tie correction and continuity
/// correction. Identical pooled values give p = 1.
double rank_sum_test(const std::vector<double>& sample_a,
                     const std::vector<double>& sample_b);

struct StatSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double median = 0.0;
  double p_value = 1.0;  // vs the configured baseline sample
  int n_runs = 0;
};

StatSummary summarize(const std::vector<double>& samples);

}  // namespace l2go
