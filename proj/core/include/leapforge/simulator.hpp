#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "leapforge/base_station.hpp"
#include "leapforge/keying.hpp"
#include "leapforge/node.hpp"
#include "leapforge/radio.hpp"
#include "leapforge/scenario.hpp"
#include "leapforge/trace.hpp"

namespace leapforge {

class UnknownNode : public std::out_of_range {
 public:
  explicit UnknownNode(NodeId id) : std::out_of_range("unknown node " + std::to_string(id)) {}
};

/// A frame as it went on the air.
struct RecordedFrame {
  SimTime t{};
  EndpointId from = 0;
  Bytes bytes;
};

struct EavesdropReport {
  std::size_t frames_heard = 0;
  /// Hex of every true key found verbatim in a transmitted frame.
  std::vector<std::string> learned_keys;
};

// Event payloads.
struct BootEvent {
  EndpointId who;
};
struct DeliveryEvent {
  EndpointId to;
  Bytes frame;
  std::uint32_t flood_hop;  // > 0 for base-station broadcasts relayed by nodes
};
struct TimerEvent {
  EndpointId who;
};
struct AuditTick {
  bool close;
};
struct UplinkArrival {
  Bytes frame;
};
struct AdversaryAction {
  std::size_t adversary;
  std::uint32_t step;
};

struct SimEvent {
  SimTime time{};
  std::uint64_t seq = 0;
  std::variant<BootEvent, DeliveryEvent, TimerEvent, AuditTick, UplinkArrival, AdversaryAction> kind;
};

/// Deterministic discrete-event run of one scenario. Events execute in
/// (time, seq) order; a (scenario, seed) pair always yields the same trace.
///
/// Base-station broadcasts (SEQ_REQ, REVOKE) are flooded by honest,
/// non-revoked nodes with per-node duplicate suppression. SEQ_RESP frames
/// travel back to the base station over as many hops as the request took.
class Simulator {
 public:
  /// Validates the scenario (ScenarioInvalid), resolves placement and
  /// preloads every node.
  explicit Simulator(Scenario scenario);

  /// Runs until the event queue drains or the horizon is reached.
  void run();
  /// Executes every event with time <= t (bounded by the horizon).
  void run_until(SimTime t);

  SimTime now() const { return now_; }
  SimTime horizon() const { return horizon_; }
  bool finished() const { return finished_; }

  /// Scenario with placement resolved.
  const Scenario& scenario() const { return scenario_; }
  const RunTrace& trace() const { return trace_; }
  const RadioModel& radio() const { return radio_; }
  const AuditRegistry& registry() const { return registry_; }
  const std::map<NodeId, NodeRuntime>& nodes() const { return nodes_; }
  /// Runtimes fielded by clone adversaries, in activation order.
  std::vector<const NodeRuntime*> clones() const;
  const std::vector<RecordedFrame>& air_log() const { return air_log_; }
  const NetworkPreload& preload() const { return preload_; }
  const SymKey& initial_key() const { return initial_key_; }

  /// Serialized store of `node` as of simulated time `at` (<= now()).
  /// Throws UnknownNode or std::out_of_range.
  Bytes capture_node(NodeId node, SimTime at) const;
  std::optional<SimTime> erase_time(NodeId node) const;
  std::optional<SimTime> boot_time(NodeId node) const;
  std::optional<EavesdropReport> eavesdrop_report() const { return eavesdrop_report_; }

  /// Broadcasts a raw frame at `at` to every endpoint, outside the flood
  /// service. Used to re-inject recorded traffic.
  void inject(Bytes frame, SimTime at);

 private:
  enum class EntityKind : std::uint8_t { BaseStation, Node, Clone, FloodAttacker, Replayer };

  struct Entity {
    EntityKind kind;
    NodeId protocol_id = 0;
    std::optional<std::size_t> adversary{};
    std::set<Bytes> floods_seen{};
    std::uint32_t request_hops = 0;
  };

  struct Prepared;
  explicit Simulator(Prepared prepared);
  static Prepared prepare(Scenario scenario);

  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void resolve_placement();
  void schedule(SimTime at, decltype(SimEvent::kind) kind);
  void dispatch(const SimEvent& ev);
  void on_boot(EndpointId who);
  void on_delivery(const DeliveryEvent& ev);
  void on_timer(EndpointId who);
  void on_audit(bool close);
  void on_uplink(const Bytes& frame);
  void on_adversary(const AdversaryAction& action);
  void finish();

  NodeRuntime* runtime_of(EndpointId who);
  void deliver_to_runtime(EndpointId who, NodeRuntime& rt, const WireMessage& msg);
  void after_handler(EndpointId who, NodePhase phase_before);
  void broadcast(EndpointId from, const Bytes& frame, std::uint32_t flood_hop = 0);
  void broadcast(EndpointId from, const WireMessage& msg) { broadcast(from, encode(msg)); }
  void send_uplink(EndpointId from, const SeqResponse& resp);
  void record_on_air(EndpointId from, const Bytes& frame);
  void snapshot(NodeId node);
  void remember_keys(const NodeKeyStore& store);

  TraceEvent& emit(std::string kind, std::optional<std::int64_t> src = std::nullopt,
                   std::optional<std::int64_t> dst = std::nullopt);
  TraceEvent& emit_for(EndpointId who, std::string kind,
                       std::optional<std::int64_t> dst = std::nullopt);

  Scenario scenario_;
  SimTime horizon_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  bool finished_ = false;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;

  RadioModel radio_;
  Rng radio_rng_;
  Rng uplink_rng_;
  SymKey initial_key_{Block16{}, KeyRole::Initial};
  NetworkPreload preload_;
  AuditRegistry registry_;
  bool audits_running_ = false;

  std::map<EndpointId, Entity> entities_;
  std::map<NodeId, NodeRuntime> nodes_;
  std::map<EndpointId, NodeRuntime> clone_runtimes_;
  std::map<std::size_t, Bytes> captured_;  // adversary index -> dump
  std::map<NodeId, SimTime> boot_times_;
  std::map<NodeId, SimTime> erase_times_;
  std::map<NodeId, std::vector<std::pair<SimTime, Bytes>>> history_;

  std::vector<RecordedFrame> air_log_;
  std::vector<std::pair<std::size_t, RecordedFrame>> replay_tapes_;
  bool eavesdropping_ = false;
  std::set<Block16> true_keys_;
  std::optional<EavesdropReport> eavesdrop_report_;

  RunTrace trace_;
};

/// Runs a scenario to completion, optionally overriding its seed.
RunTrace run(Scenario scenario, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace leapforge
