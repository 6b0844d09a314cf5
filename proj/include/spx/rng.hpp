#pragma once

#include <cstdint>

namespace spx {

// SplitMix64 finalizer; stateless so streams can be derived in any order.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Expands one run seed into independent per-entry seeds: stream names the
// consumer (noise, angle, pose, ...), index is the entry counter.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(seed ^ mix64(stream)) + index);
}

}  // namespace spx
