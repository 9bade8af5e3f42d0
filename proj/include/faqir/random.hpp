#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace faqir {

// All seeded randomness uses std::mt19937_64, whose output sequence is fixed
// by the standard. The standard distributions are implementation-defined, so
// bounded draws go through uniform_index() below instead.
using Rng = std::mt19937_64;

// Unbiased draw from [0, bound) by rejection. bound must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % bound;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// FNV-1a, used to derive stable per-item seeds from string ids.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view key) {
  std::uint64_t z = seed ^ fnv1a(key);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace faqir
