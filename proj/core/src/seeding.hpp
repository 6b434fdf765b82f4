#pragma once

#include <cstdint>

namespace hamenc::detail {

// Independent RNG streams derived from one user seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;
inline constexpr std::uint64_t kFoldStream = 3;
inline constexpr std::uint64_t kTrainStream = 4;
inline constexpr std::uint64_t kSvmStream = 5;
inline constexpr std::uint64_t kVerifyStream = 6;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

}  // namespace hamenc::detail
