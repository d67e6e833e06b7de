#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leapforge {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Protocol node identifier. 0 is reserved for the base station.
using NodeId = std::uint16_t;
inline constexpr NodeId kBaseStationId = 0;

std::string to_hex(ByteView bytes);
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != N) {
    throw std::invalid_argument("hex literal has wrong length");
  }
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

// Big-endian field helpers used by the wire codec and PRF input encoding.
void put_u16_be(Bytes& out, std::uint16_t v);
void put_u32_be(Bytes& out, std::uint32_t v);
std::uint16_t get_u16_be(ByteView in, std::size_t offset);
std::uint32_t get_u32_be(ByteView in, std::size_t offset);

inline void append(Bytes& out, ByteView more) { out.insert(out.end(), more.begin(), more.end()); }

/// True if `needle` occurs anywhere in `haystack` as a contiguous window.
bool contains_window(ByteView haystack, ByteView needle);

}  // namespace leapforge
