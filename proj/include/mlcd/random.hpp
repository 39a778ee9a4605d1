#pragma once

#include <cstdint>
#include <random>

namespace mlcd {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based seed splitting: the stream for `index` depends only on
/// (seed, index), so serial and parallel schedules draw identical numbers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

}  // namespace mlcd
