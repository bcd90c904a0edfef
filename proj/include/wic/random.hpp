#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace wic {

// One engine per run or worker. Draw helpers below avoid the
// implementation-defined std distributions so sequences are identical across
// standard libraries.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Draws an index from a probability vector by inverse CDF. Rounding slack in
// the tail falls on the last index with positive mass.
inline int sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last;
  }
  return last;
}

}  // namespace wic
