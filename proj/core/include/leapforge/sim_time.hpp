#pragma once

#include <chrono>
#include <cstdint>

namespace leapforge {

/// Simulated time since the start of a run, microsecond resolution.
using SimTime = std::chrono::microseconds;

constexpr SimTime from_ms(double ms) {
  return SimTime{static_cast<std::int64_t>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5))};
}
constexpr double to_ms(SimTime t) { return static_cast<double>(t.count()) / 1000.0; }

}  // namespace leapforge
