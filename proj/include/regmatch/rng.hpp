#pragma once

#include <cstdint>
#include <random>

namespace regmatch {

// Default generator for the whole library. The CLI records its identity in
// output metadata so runs can be reproduced exactly.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64";

// SplitMix64 mixing step. Used to whiten user seeds and to derive
// independent streams for parallel trials.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Stream for one benchmark cell: fold (n, d, trial) into the base seed so
// cells never share generator state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

inline Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
  return Rng(derive_seed(seed, a, b, c));
}

}  // namespace regmatch
