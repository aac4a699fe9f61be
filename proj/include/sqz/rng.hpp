#pragma once

#include <cstdint>
#include <random>

namespace sqz {

/// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for experiment (k, m) of a campaign: hash(master, k, m).
/// Documented derivation so runs are independent and reorderable.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k, std::uint64_t m) {
  return mix64(mix64(master ^ mix64(k + 1)) ^ mix64(m + 0x51ed2701));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

} // namespace sqz
