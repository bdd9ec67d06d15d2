#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace l2go {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent substream seed from a master seed and up to two
// stream indices. Used so that parallel work items draw from disjoint
// streams regardless of scheduling order.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a + 0x9e3779b97f4a7c15ULL);
  h = splitmix64(s);
  s = h ^ (b + 0xd1b54a32d192ed03ULL);
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t a = 0,
                                std::uint64_t b = 0) {
  return std::mt19937_64(mix_seed(master, a, b));
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, int n,
                                       double sigma = 1.0) {
  std::normal_distribution<double> dist(0.0, sigma);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

// Uniform on the unit sphere (normalized Gaussian draw).
inline Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, int n) {
  for (;;) {
    Eigen::VectorXd v = gaussian_vector(rng, n);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace l2go
