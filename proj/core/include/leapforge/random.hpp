#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace leapforge {

/// All simulation entropy comes from seeded instances of this engine.
using Rng = std::mt19937_64;

template <std::size_t N>
std::array<std::uint8_t, N> random_bytes(Rng& rng) {
  std::array<std::uint8_t, N> out{};
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (i % 8 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

/// Mixes a base seed with stream labels (node id, purpose, repeat index...) so
/// independent streams never share state.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

}  // namespace leapforge
