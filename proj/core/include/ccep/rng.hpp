#pragma once

// Counter-style seeding: every (seed, index) pair maps to its own engine
// state, so unit i of replication r draws the same numbers no matter which
// thread generates it or in what order.

#include <cstdint>
#include <random>

namespace ccep {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `seed`: splitmix64(splitmix64(seed) + index).
inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) + index);
}

inline Engine substream(std::uint64_t seed, std::uint64_t index) {
  return Engine(substream_seed(seed, index));
}

}  // namespace ccep
