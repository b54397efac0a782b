#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

// Counter-based generator: value i of a stream is a pure function of
// (seed, i), so draws can be evaluated in any order (or in parallel) and a
// k-direction sample is always a prefix of a larger one with the same seed.

namespace rcd::rng {

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
  // splitmix64 finalizer applied to seed + counter * golden gamma
  std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t bits = mix64(seed, counter) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

// Standard Gaussian via Box-Muller; consumes counters 2c and 2c+1.
inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = uniform01(seed, 2 * counter);
  const double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// k unit vectors in R^dim, direction i drawn from counters [i*dim, (i+1)*dim).
inline std::vector<Eigen::VectorXd> unit_directions(int dim, int k, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v(dim);
    std::uint64_t base = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(dim);
    double norm = 0.0;
    do {
      for (int j = 0; j < dim; ++j) v[j] = gaussian(seed, base + static_cast<std::uint64_t>(j));
      norm = v.norm();
      base += (1ULL << 40);  // retry stride independent of k, keeps the prefix property; hit with probability ~0
    } while (norm < 1e-12);
    dirs[static_cast<std::size_t>(i)] = v / norm;
  }
  return dirs;
}

}  // namespace rcd::rng
