#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "leapforge/sim_time.hpp"

namespace leapforge {

/// One line of trace.jsonl: {t_ms, kind, src, dst, detail} in that order.
struct TraceEvent {
  SimTime t{};
  std::string kind;
  std::optional<std::int64_t> src;
  std::optional<std::int64_t> dst;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct RunTrace {
  std::vector<TraceEvent> events;

  std::size_t count(std::string_view kind) const;
  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

std::string to_json_line(const TraceEvent& event);
std::string to_jsonl(const RunTrace& trace);
/// Throws std::runtime_error on a malformed line.
RunTrace parse_jsonl(std::string_view text);

}  // namespace leapforge
