#pragma once

#include <cstdint>
#include <random>

namespace flda {

using Rng = std::mt19937_64;

/// Independent stream seed for (base, stream), via the splitmix64 finalizer.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound > 0; rejection keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) noexcept {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) {
    draw = rng();
  }
  return draw % bound;
}

}  // namespace flda
