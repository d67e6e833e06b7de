#include "leapforge/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leapforge {

std::size_t RunTrace::count(std::string_view kind) const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [kind](const TraceEvent& e) { return e.kind == kind; }));
}

std::string to_json_line(const TraceEvent& event) {
  nlohmann::ordered_json j;
  j["t_ms"] = to_ms(event.t);
  j["kind"] = event.kind;
  j["src"] = event.src ? nlohmann::ordered_json(*event.src) : nlohmann::ordered_json(nullptr);
  j["dst"] = event.dst ? nlohmann::ordered_json(*event.dst) : nlohmann::ordered_json(nullptr);
  j["detail"] = event.detail;
  return j.dump();
}

std::string to_jsonl(const RunTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    out += to_json_line(e);
    out += '\n';
  }
  return out;
}

RunTrace parse_jsonl(std::string_view text) {
  RunTrace trace;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("t_ms") || !j.contains("kind") || !j.contains("detail")) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": missing fields");
    }
    TraceEvent e;
    e.t = SimTime{std::llround(j.at("t_ms").get<double>() * 1000.0)};
    e.kind = j.at("kind").get<std::string>();
    if (j.contains("src") && !j.at("src").is_null()) e.src = j.at("src").get<std::int64_t>();
    if (j.contains("dst") && !j.at("dst").is_null()) e.dst = j.at("dst").get<std::int64_t>();
    e.detail = j.at("detail");
    trace.events.push_back(std::move(e));
  }
  return trace;
}

}  // namespace leapforge
