#include "leapforge/scenario.hpp"

#include <cmath>
#include <sstream>

namespace leapforge {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view adversary_kind(const AdversaryConfig& cfg) {
  switch (cfg.index()) {
    case 0: return "hello_flood";
    case 1: return "clone";
    case 2: return "replay";
    default: return "eavesdrop";
  }
}

namespace {

std::string join_reasons(const std::vector<std::string>& reasons) {
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& r : reasons) os << "\n  " << r;
  return os.str();
}

}  // namespace

ScenarioInvalid::ScenarioInvalid(std::vector<std::string> reasons)
    : std::runtime_error(join_reasons(reasons)), reasons_(std::move(reasons)) {}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> out;
  auto check = [&out](bool ok, std::string msg) {
    if (!ok) out.push_back(std::move(msg));
  };
  auto finite = [](double v) { return std::isfinite(v); };

  check(!name.empty(), "name: must not be empty");
  check(name.find_first_of("/\\") == std::string::npos && name != "." && name != "..",
        "name: must be usable as a directory name");
  check(node_count >= 1 && node_count < 0xff00, "node_count: must be in [1, 65279]");
  check(positions.empty() || positions.size() == node_count,
        "positions: must list exactly node_count placements");
  for (const auto& p : positions) {
    if (!finite(p.x) || !finite(p.y)) {
      out.emplace_back("positions: coordinates must be finite");
      break;
    }
  }
  check(finite(area_m) && area_m > 0, "area_m: must be > 0");
  check(finite(radio.range_m) && radio.range_m > 0, "radio.range_m: must be > 0");
  check(finite(radio.latency_ms) && radio.latency_ms >= 0, "radio.latency_ms: must be >= 0");
  check(finite(radio.jitter_ms) && radio.jitter_ms >= 0, "radio.jitter_ms: must be >= 0");
  check(radio.loss_prob >= 0 && radio.loss_prob <= 1, "radio.loss_prob: must be in [0, 1]");
  check(finite(t_min_ms) && t_min_ms > 0, "t_min_ms: must be > 0");
  check(finite(boot_jitter_ms) && boot_jitter_ms >= 0, "boot_jitter_ms: must be >= 0");
  check(!audit_start_ms || (finite(*audit_start_ms) && *audit_start_ms >= 0),
        "audit_start_ms: must be >= 0");
  check(finite(response_deadline_ms) && response_deadline_ms > 0,
        "response_deadline_ms: must be > 0");
  check(finite(audit_period_ms) &&
            (audit_period_ms == 0 || audit_period_ms > response_deadline_ms),
        "audit_period_ms: must be 0 (single round) or longer than response_deadline_ms");
  check(chain_length >= 1 && chain_length <= 4096, "chain_length: must be in [1, 4096]");
  check(finite(horizon_ms) && horizon_ms > 0, "horizon_ms: must be > 0");

  for (std::size_t i = 0; i < adversaries.size(); ++i) {
    const std::string prefix = "adversary[" + std::to_string(i) + "].";
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, HelloFloodConfig>) {
            check(finite(a.tx_multiplier) && a.tx_multiplier > 0, prefix + "tx_multiplier: must be > 0");
            check(finite(a.start_ms) && a.start_ms >= 0, prefix + "start_ms: must be >= 0");
            check(finite(a.interval_ms) && a.interval_ms > 0, prefix + "interval_ms: must be > 0");
            check(a.count >= 1, prefix + "count: must be >= 1");
            check(a.attacker_id != kBaseStationId &&
                      (a.attacker_id < 1 || a.attacker_id > node_count),
                  prefix + "attacker_id: must not collide with the base station or a node");
          } else if constexpr (std::is_same_v<T, CloneConfig>) {
            check(a.victim_id >= 1 && a.victim_id <= node_count,
                  prefix + "victim_id: must name a node");
            check(finite(a.capture_ms) && a.capture_ms >= 0 && a.capture_ms <= horizon_ms,
                  prefix + "capture_ms: must be within the run horizon");
            check(finite(a.activate_delay_ms) && a.activate_delay_ms >= 0,
                  prefix + "activate_delay_ms: must be >= 0");
          } else if constexpr (std::is_same_v<T, ReplayConfig>) {
            check(finite(a.record_from_ms) && finite(a.record_to_ms) &&
                      a.record_from_ms <= a.record_to_ms,
                  prefix + "record_window: start must not exceed end");
            check(finite(a.replay_ms) && a.replay_ms >= a.record_to_ms,
                  prefix + "replay_ms: must not precede the end of the record window");
            check(!a.types.empty(), prefix + "types: must not be empty");
          }
        },
        adversaries[i]);
  }
  return out;
}

void require_valid(const Scenario& scenario) {
  auto reasons = scenario.validate();
  if (!reasons.empty()) throw ScenarioInvalid(std::move(reasons));
}

}  // namespace leapforge
