#pragma once

#include <cstdint>
#include <random>

namespace sphcnn {

// Every random stream in the library is a 64-bit Mersenne Twister
// (std::mt19937_64). Streams for independent work items are derived with
// derive_seed so results never depend on evaluation order.
using Rng = std::mt19937_64;

// SplitMix64 finalizer applied to (base, a, b).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t z = base ^ (a * 0x9E3779B97F4A7C15ULL) ^
                    (b * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace sphcnn
