#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace distbandit {

using Rng = std::mt19937_64;

/// Uniform draw on [0, 1) from the top 53 bits of one engine output.
/// Unlike std::uniform_real_distribution this is identical across
/// standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for (seed, index). Episodes, bias Monte Carlo and
/// scenario construction each draw from their own substream so that
/// results never depend on scheduling.
inline Rng substream(std::uint64_t seed, std::uint64_t index,
                     std::uint64_t salt = 0) {
  std::seed_seq seq{mix64(seed), mix64(index ^ 0x5851f42d4c957f2dULL),
                    mix64(salt + 0x2545f4914f6cdd1dULL)};
  return Rng(seq);
}

/// Inverse-cdf draw from the categorical law `w` (assumed normalized).
template <typename Derived>
Eigen::Index sample_categorical(const Eigen::MatrixBase<Derived>& w,
                                Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const Eigen::Index k = w.size();
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    acc += w(i);
    if (u < acc) return i;
  }
  return k - 1;
}

}  // namespace distbandit
