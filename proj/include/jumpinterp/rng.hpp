#pragma once

#include <cstdint>
#include <random>

namespace jumpinterp {

// SplitMix64 finalizer. Used to derive independent per-instance streams from
// a (seed, index) pair so ensembles are reproducible regardless of the order
// or thread in which instances are evaluated.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t stream = 0) {
  return std::mt19937_64(
      splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL) ^
                 (stream * 0xd1b54a32d192ed03ULL)));
}

}  // namespace jumpinterp
