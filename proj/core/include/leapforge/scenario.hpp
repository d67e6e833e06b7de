#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "leapforge/bytes.hpp"
#include "leapforge/wire.hpp"

namespace leapforge {

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

struct RadioParams {
  double range_m = 30.0;
  double latency_ms = 5.0;
  double jitter_ms = 5.0;  // uniform in [0, jitter_ms]
  double loss_prob = 0.0;
  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

/// High-power transmitter that broadcasts HELLOs and answers overheard
/// HELLOs with forged ACKs. It never learns the initial key.
struct HelloFloodConfig {
  double tx_multiplier = 10.0;
  double start_ms = 0.0;
  double interval_ms = 100.0;
  std::uint32_t count = 20;
  NodeId attacker_id = 0xfff0;
  std::optional<Position> position;  // default: centre of the deployment area
  friend bool operator==(const HelloFloodConfig&, const HelloFloodConfig&) = default;
};

enum class CloneSequence : std::uint8_t {
  Guess,     // clone answers audits with a random sequence number
  Captured,  // clone reuses the sequence number from the captured store
};

/// Captures the victim's store at capture_ms and fields a copy of it.
/// Before the victim's erasure deadline the copy includes the initial key.
struct CloneConfig {
  NodeId victim_id = 1;
  double capture_ms = 500.0;
  double activate_delay_ms = 0.0;
  std::optional<Position> position;  // default: the victim's position
  CloneSequence sequence = CloneSequence::Guess;
  friend bool operator==(const CloneConfig&, const CloneConfig&) = default;
};

/// Records every frame of the selected types transmitted during
/// [record_from_ms, record_to_ms] and re-injects them verbatim at replay_ms,
/// reaching every entity.
struct ReplayConfig {
  double record_from_ms = 0.0;
  double record_to_ms = 10000.0;
  double replay_ms = 20000.0;
  std::set<MsgType> types{MsgType::Ack, MsgType::SeqRequest, MsgType::Revoke};
  friend bool operator==(const ReplayConfig&, const ReplayConfig&) = default;
};

/// Passive listener that hears every transmitted frame.
struct EavesdropConfig {
  friend bool operator==(const EavesdropConfig&, const EavesdropConfig&) = default;
};

using AdversaryConfig = std::variant<HelloFloodConfig, CloneConfig, ReplayConfig, EavesdropConfig>;

std::string_view adversary_kind(const AdversaryConfig& cfg);

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::size_t node_count = 10;
  /// Explicit placements for nodes 1..n; empty means seeded uniform scatter
  /// in an area_m x area_m square, resampled until the radio graph
  /// (including the base station) is connected.
  std::vector<Position> positions;
  double area_m = 60.0;
  std::optional<Position> base_station;  // default: area centre / node centroid
  RadioParams radio;
  double t_min_ms = 2000.0;
  double boot_jitter_ms = 50.0;
  bool audits = true;
  std::optional<double> audit_start_ms;  // default: t_min_ms + boot_jitter_ms + 1000
  double audit_period_ms = 10000.0;      // 0 runs a single audit round
  double response_deadline_ms = 1000.0;
  std::uint32_t chain_length = 64;
  double horizon_ms = 60000.0;
  std::vector<AdversaryConfig> adversaries;

  double effective_audit_start_ms() const {
    return audit_start_ms.value_or(t_min_ms + boot_jitter_ms + 1000.0);
  }

  /// Field-level problems, empty when the scenario is runnable.
  std::vector<std::string> validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ScenarioInvalid : public std::runtime_error {
 public:
  explicit ScenarioInvalid(std::vector<std::string> reasons);
  const std::vector<std::string>& reasons() const { return reasons_; }

 private:
  std::vector<std::string> reasons_;
};

/// Throws ScenarioInvalid listing every problem.
void require_valid(const Scenario& scenario);

}  // namespace leapforge
