#ifndef SEPCA_RNG_HPP
#define SEPCA_RNG_HPP

#include <cstdint>
#include <random>

namespace sepca {

/// Engine used for all sampling. Streams are reproducible within one build;
/// across standard libraries only the distribution is guaranteed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for one trial of one grid cell: root ^ hash(cell, trial). A trial's seed
/// does not depend on how many trials run in total.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t cell, std::uint64_t trial) noexcept {
  return root ^ mix64(mix64(cell) ^ mix64(trial + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace sepca

#endif  // SEPCA_RNG_HPP
