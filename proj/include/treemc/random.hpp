#ifndef TREEMC_RANDOM_HPP
#define TREEMC_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

#include "treemc/errors.hpp"

namespace treemc {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-streams from one seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix64(seed ^ mix64(stream)));
}

// Uniform in [0,1) with 53 random bits. Bypasses std::uniform_real_distribution
// so that streams are reproducible independent of the standard library.
inline double next_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draws an index from a nonnegative weight vector. Zero-weight entries are
// never returned; `skip` (when >= 0) is treated as weight zero.
inline int sample_weighted(std::span<const double> weights, Rng& rng, int skip = -1) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (static_cast<int>(i) != skip) total += weights[i];
  }
  if (total <= 0.0) throw Error("sample_weighted: no positive weight available");
  double u = next_unit(rng) * total;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (static_cast<int>(i) == skip || weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    u -= weights[i];
    if (u < 0.0) return last_positive;
  }
  // u consumed the full mass through rounding; the last positive entry owns
  // the closing interval.
  return last_positive;
}

}  // namespace treemc

#endif
