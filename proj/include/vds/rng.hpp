#pragma once

#include <cstdint>
#include <random>

namespace vds {

// All randomness flows through explicitly seeded mt19937_64 streams so
// every artifact is reproducible from a single u64. Floating-point draws
// avoid std::uniform_real_distribution, whose output is not pinned down
// by the standard across implementations.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t next() { return eng(); }
};

// splitmix64 finalizer (Steele/Lea/Flood); used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for the i-th parallel trial of a run with the given master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
}

// Uniform double in [0, 1), 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; exact for any bound.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t v;
  do {
    v = rng.next();
  } while (v >= limit);
  return v % bound;
}

}  // namespace vds
