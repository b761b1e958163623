#pragma once

#include <cstdint>

namespace schottky::detail {

// SplitMix64 step (Steele/Lea/Vigna); advances the state and returns 64
// mixed bits.  Used as a counter-based generator: every sample index gets
// its own stream via stream_state, so draws are reproducible regardless of
// evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_state(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
  splitmix64(s);  // decorrelate nearby indices before the first draw
  return s;
}

// Uniform double in [0, 1) from the top 53 bits of the next draw.
inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace schottky::detail
