#include <doctest.h>

#include "l2go/rng.hpp"
#include "l2go/stats.hpp"

using namespace l2go;

TEST_SUITE("stats") {

TEST_CASE("identical samples give p = 1") {
  CHECK(rank_sum_test({2, 2, 2}, {2, 2}) == 1.0);
  std::vector<double> big(30, 7.0);
  CHECK(rank_sum_test(big, big) == 1.0);
}

TEST_CASE("fully separated size-3 samples") {
  // Hand enumeration: W_A = 6 is the unique minimum of C(6,3) = 20 equally
  // likely rank subsets, so the two-sided exact p is 2 * 1/20 = 0.1.
  CHECK(rank_sum_test({1, 2, 3}, {10, 11, 12}) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("fully separated size-6 samples are significant") {
  // W_A minimal among C(12,6) = 924 subsets: p = 2/924.
  const double p = rank_sum_test({1, 2, 3, 4, 5, 6}, {10, 11, 12, 13, 14, 15});
  CHECK(p == doctest::Approx(2.0 / 924.0).epsilon(1e-12));
  CHECK(p < 0.05);
}

TEST_CASE("worked example enumerated by hand") {
  // A = {8, 12}, B = {10, 14, 16}: pooled ranks give W_A = 1 + 3 = 4.
  // Sums over the 10 subsets of size 2: {3,4,5,5,6,6,7,7,8,9}, so
  // P(W <= 4) = 2/10 and the two-sided p is 0.4.
  CHECK(rank_sum_test({8, 12}, {10, 14, 16}) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("worked example with ties") {
  // A = {1, 2, 2}, B = {2, 3, 4}: midranks are {1, 3, 3, 3, 5, 6} and
  // W_A = 7 is the minimum, shared by 3 of the 20 subsets: p = 2 * 3/20.
  CHECK(rank_sum_test({1, 2, 2}, {2, 3, 4}) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("normal approximation flags clear shifts") {
  auto rng = make_rng(17, 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> a(40), b(40), c(40);
  for (int i = 0; i < 40; ++i) {
    a[i] = noise(rng);
    b[i] = noise(rng) + 2.0;
    c[i] = noise(rng);
  }
  CHECK(rank_sum_test(a, b) < 0.001);
  CHECK(rank_sum_test(a, c) > 0.05);
}

TEST_CASE("summaries") {
  const StatSummary s = summarize({1, 2, 3, 4});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.std_dev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.n_runs == 4);

  const StatSummary odd = summarize({5, 1, 9});
  CHECK(odd.median == doctest::Approx(5.0));
}

}  // TEST_SUITE
