#include "leapforge/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace leapforge {

namespace {

// Independent entropy streams per purpose.
enum StreamLabel : std::uint64_t {
  kStreamKeys = 1,
  kStreamPlacement = 2,
  kStreamBoot = 3,
  kStreamRadio = 4,
  kStreamUplink = 5,
  kStreamNode = 100,
  kStreamAdversary = 200,
};

constexpr int kMaxPlacementAttempts = 10000;
constexpr double kReplayTxMultiplier = 1e9;

bool is_flood_type(MsgType t) { return t == MsgType::SeqRequest || t == MsgType::Revoke; }

bool connected_with_base(const std::vector<Position>& nodes, const Position& base, double range) {
  std::vector<Position> all{base};
  all.insert(all.end(), nodes.begin(), nodes.end());
  std::vector<bool> seen(all.size(), false);
  std::deque<std::size_t> frontier{0};
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!seen[i] && distance(all[cur], all[i]) <= range) {
        seen[i] = true;
        frontier.push_back(i);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

nlohmann::ordered_json frame_detail(MsgType type, std::size_t bytes) {
  nlohmann::ordered_json d;
  d["type"] = to_string(type);
  d["bytes"] = bytes;
  return d;
}

}  // namespace

struct Simulator::Prepared {
  Scenario scenario;
  SymKey initial_key;
  NetworkPreload preload;
  HashChain chain;
};

Simulator::Prepared Simulator::prepare(Scenario scenario) {
  require_valid(scenario);

  // Placement first: it can still reject the scenario.
  if (scenario.positions.empty()) {
    Rng rng(derive_seed(scenario.seed, {kStreamPlacement}));
    std::uniform_real_distribution<double> coord(0.0, scenario.area_m);
    const Position base =
        scenario.base_station.value_or(Position{scenario.area_m / 2, scenario.area_m / 2});
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      std::vector<Position> candidate;
      for (std::size_t i = 0; i < scenario.node_count; ++i) {
        const double x = coord(rng);
        const double y = coord(rng);
        candidate.push_back(Position{x, y});
      }
      if (connected_with_base(candidate, base, scenario.radio.range_m)) {
        scenario.positions = std::move(candidate);
        placed = true;
      }
    }
    if (!placed) {
      throw ScenarioInvalid({"area_m: no connected placement found; shrink the area or raise radio.range_m"});
    }
    scenario.base_station = base;
  } else if (!scenario.base_station) {
    Position centroid;
    for (const auto& p : scenario.positions) {
      centroid.x += p.x;
      centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(scenario.positions.size());
    centroid.y /= static_cast<double>(scenario.positions.size());
    scenario.base_station = centroid;
  }

  Rng keys(derive_seed(scenario.seed, {kStreamKeys}));
  const SymKey initial_key = random_key(keys, KeyRole::Initial);
  const SymKey global_key = random_key(keys, KeyRole::Global);
  HashChain chain = HashChain::build(random_bytes<16>(keys), scenario.chain_length);
  NetworkPreload preload = preload_network(scenario.node_count, initial_key, global_key,
                                           chain.commitment(), keys, from_ms(scenario.t_min_ms));
  return Prepared{std::move(scenario), initial_key, std::move(preload), std::move(chain)};
}

Simulator::Simulator(Scenario scenario) : Simulator(prepare(std::move(scenario))) {}

Simulator::Simulator(Prepared prepared)
    : scenario_(std::move(prepared.scenario)),
      horizon_(from_ms(scenario_.horizon_ms)),
      radio_(RadioModel::from_params(scenario_.radio)),
      radio_rng_(derive_seed(scenario_.seed, {kStreamRadio})),
      uplink_rng_(derive_seed(scenario_.seed, {kStreamUplink})),
      initial_key_(prepared.initial_key),
      preload_(std::move(prepared.preload)),
      registry_(preload_.registry, std::move(prepared.chain), from_ms(scenario_.response_deadline_ms)) {
  {
    auto& e = emit("run_start");
    e.detail["name"] = scenario_.name;
    e.detail["seed"] = scenario_.seed;
    e.detail["nodes"] = scenario_.node_count;
  }

  radio_.positions[kBaseStationId] = *scenario_.base_station;
  entities_.emplace(kBaseStationId, Entity{EntityKind::BaseStation});

  Rng boot_rng(derive_seed(scenario_.seed, {kStreamBoot}));
  std::uniform_int_distribution<std::int64_t> boot_jitter(0, from_ms(scenario_.boot_jitter_ms).count());
  for (const auto& bundle : preload_.bundles) {
    const NodeId id = bundle.node_id;
    const Position pos = scenario_.positions[id - 1];
    radio_.positions[id] = pos;
    entities_.emplace(id, Entity{EntityKind::Node, id});
    history_[id].emplace_back(SimTime{0}, NodeKeyStore::from_bundle(bundle).dump());
    auto& e = emit("place", id);
    e.detail["x"] = pos.x;
    e.detail["y"] = pos.y;
    e.detail["store_bytes"] = history_[id].back().second.size();
    schedule(SimTime{boot_jitter(boot_rng)}, BootEvent{id});
  }

  for (std::size_t k = 0; k < scenario_.adversaries.size(); ++k) {
    const auto& adv = scenario_.adversaries[k];
    const EndpointId endpoint = kAdversaryEndpointBase + static_cast<EndpointId>(k);
    if (const auto* flood = std::get_if<HelloFloodConfig>(&adv)) {
      radio_.positions[endpoint] = flood->position.value_or(*scenario_.base_station);
      radio_.tx_multiplier[endpoint] = flood->tx_multiplier;
      entities_.emplace(endpoint, Entity{EntityKind::FloodAttacker, flood->attacker_id, k});
      schedule(from_ms(flood->start_ms), AdversaryAction{k, 0});
    } else if (const auto* clone = std::get_if<CloneConfig>(&adv)) {
      schedule(from_ms(clone->capture_ms), AdversaryAction{k, 0});
    } else if (const auto* replay = std::get_if<ReplayConfig>(&adv)) {
      schedule(from_ms(replay->replay_ms), AdversaryAction{k, 0});
    } else {
      eavesdropping_ = true;
    }
  }
  if (eavesdropping_) {
    for (const auto& [id, snaps] : history_) remember_keys(NodeKeyStore::parse_dump(snaps.back().second));
  }

  if (scenario_.audits) {
    const SimTime start = from_ms(scenario_.effective_audit_start_ms());
    if (start <= horizon_) {
      audits_running_ = true;
      schedule(start, AuditTick{false});
    }
  }
}

// ---------------------------------------------------------------------------

TraceEvent& Simulator::emit(std::string kind, std::optional<std::int64_t> src,
                            std::optional<std::int64_t> dst) {
  trace_.events.push_back(TraceEvent{now_, std::move(kind), src, dst, nlohmann::ordered_json::object()});
  return trace_.events.back();
}

TraceEvent& Simulator::emit_for(EndpointId who, std::string kind, std::optional<std::int64_t> dst) {
  const Entity& ent = entities_.at(who);
  TraceEvent& e = emit(std::move(kind), ent.protocol_id, dst);
  switch (ent.kind) {
    case EntityKind::Clone: e.detail["entity"] = "clone"; break;
    case EntityKind::FloodAttacker: e.detail["entity"] = "hello_flood"; break;
    case EntityKind::Replayer: e.detail["entity"] = "replay"; break;
    default: break;
  }
  return e;
}

void Simulator::schedule(SimTime at, decltype(SimEvent::kind) kind) {
  if (at < now_) throw InvariantViolation("event scheduled before the event that caused it");
  queue_.push(SimEvent{at, next_seq_++, std::move(kind)});
}

void Simulator::run() {
  run_until(horizon_);
  finish();
}

void Simulator::run_until(SimTime t) {
  const SimTime limit = std::min(t, horizon_);
  while (!queue_.empty() && queue_.top().time <= limit) {
    SimEvent ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    dispatch(ev);
  }
  if (!queue_.empty() || limit < horizon_) now_ = std::max(now_, limit);
}

void Simulator::dispatch(const SimEvent& ev) {
  std::visit(
      [this](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, BootEvent>) {
          on_boot(k.who);
        } else if constexpr (std::is_same_v<T, DeliveryEvent>) {
          on_delivery(k);
        } else if constexpr (std::is_same_v<T, TimerEvent>) {
          on_timer(k.who);
        } else if constexpr (std::is_same_v<T, AuditTick>) {
          on_audit(k.close);
        } else if constexpr (std::is_same_v<T, UplinkArrival>) {
          on_uplink(k.frame);
        } else {
          on_adversary(k);
        }
      },
      ev.kind);
}

void Simulator::finish() {
  if (finished_) return;
  finished_ = true;
  if (eavesdropping_) {
    EavesdropReport report;
    report.frames_heard = air_log_.size();
    std::set<Block16> learned;
    for (const auto& frame : air_log_) {
      for (std::size_t off = 0; off + 16 <= frame.bytes.size(); ++off) {
        Block16 window{};
        std::copy_n(frame.bytes.begin() + static_cast<std::ptrdiff_t>(off), 16, window.begin());
        if (true_keys_.contains(window)) learned.insert(window);
      }
    }
    for (const auto& k : learned) report.learned_keys.push_back(to_hex(k));
    auto& e = emit("eavesdrop_report");
    e.detail["frames"] = report.frames_heard;
    e.detail["learned_keys"] = report.learned_keys.size();
    eavesdrop_report_ = std::move(report);
  }
  auto& e = emit("run_end");
  e.detail["events"] = next_seq_;
}

// ---------------------------------------------------------------------------

std::vector<const NodeRuntime*> Simulator::clones() const {
  std::vector<const NodeRuntime*> out;
  for (const auto& [endpoint, rt] : clone_runtimes_) out.push_back(&rt);
  return out;
}

Bytes Simulator::capture_node(NodeId node, SimTime at) const {
  const auto it = history_.find(node);
  if (it == history_.end()) throw UnknownNode(node);
  if (at > now_) throw std::out_of_range("capture time lies beyond the simulated time");
  const Bytes* best = &it->second.front().second;
  for (const auto& [t, dump] : it->second) {
    if (t > at) break;
    best = &dump;
  }
  return *best;
}

std::optional<SimTime> Simulator::erase_time(NodeId node) const {
  const auto it = erase_times_.find(node);
  if (it == erase_times_.end()) return std::nullopt;
  return it->second;
}

std::optional<SimTime> Simulator::boot_time(NodeId node) const {
  const auto it = boot_times_.find(node);
  if (it == boot_times_.end()) return std::nullopt;
  return it->second;
}

void Simulator::inject(Bytes frame, SimTime at) {
  const EndpointId injector = kAdversaryEndpointBase - 1;
  if (!entities_.contains(injector)) {
    entities_.emplace(injector, Entity{EntityKind::Replayer, 0});
    radio_.positions[injector] = *scenario_.base_station;
    radio_.tx_multiplier[injector] = kReplayTxMultiplier;
  }
  // Injected frames go out through the same path as a replay adversary.
  const std::size_t tape = scenario_.adversaries.size() + replay_tapes_.size();
  replay_tapes_.push_back({tape, RecordedFrame{at, injector, std::move(frame)}});
  schedule(at, AdversaryAction{tape, 0});
}

// ---------------------------------------------------------------------------

void Simulator::remember_keys(const NodeKeyStore& store) {
  for (const auto& key : store.all_keys()) true_keys_.insert(key.bytes());
}

void Simulator::snapshot(NodeId node) {
  auto& hist = history_.at(node);
  Bytes dump = nodes_.at(node).store().dump();
  if (hist.back().second == dump) return;
  auto& e = emit("store", node);
  e.detail["bytes"] = dump.size();
  if (eavesdropping_) remember_keys(nodes_.at(node).store());
  hist.emplace_back(now_, std::move(dump));
}

NodeRuntime* Simulator::runtime_of(EndpointId who) {
  const Entity& ent = entities_.at(who);
  if (ent.kind == EntityKind::Node) {
    const auto it = nodes_.find(ent.protocol_id);
    return it == nodes_.end() ? nullptr : &it->second;
  }
  if (ent.kind == EntityKind::Clone) return &clone_runtimes_.at(who);
  return nullptr;
}

void Simulator::after_handler(EndpointId who, NodePhase phase_before) {
  NodeRuntime* rt = runtime_of(who);
  if (rt->phase() != phase_before) {
    auto& e = emit_for(who, "phase");
    e.detail["from"] = to_string(phase_before);
    e.detail["to"] = to_string(rt->phase());
  }
  if (entities_.at(who).kind == EntityKind::Node) snapshot(rt->id());
}

void Simulator::record_on_air(EndpointId from, const Bytes& frame) {
  air_log_.push_back(RecordedFrame{now_, from, frame});
  for (std::size_t k = 0; k < scenario_.adversaries.size(); ++k) {
    const auto* replay = std::get_if<ReplayConfig>(&scenario_.adversaries[k]);
    if (!replay || entities_.at(from).kind == EntityKind::Replayer) continue;
    if (now_ < from_ms(replay->record_from_ms) || now_ > from_ms(replay->record_to_ms)) continue;
    if (!replay->types.contains(static_cast<MsgType>(frame[0]))) continue;
    replay_tapes_.push_back({k, air_log_.back()});
  }
}

void Simulator::broadcast(EndpointId from, const Bytes& frame, std::uint32_t flood_hop) {
  record_on_air(from, frame);
  const auto type = static_cast<MsgType>(frame[0]);
  {
    const WireMessage msg = decode(frame);
    std::optional<std::int64_t> dst;
    if (const auto* a = std::get_if<Ack>(&msg)) dst = a->dest;
    if (const auto* c = std::get_if<ClusterKeyMsg>(&msg)) dst = c->dest;
    auto& e = emit_for(from, "tx", dst);
    e.detail.update(frame_detail(type, frame.size()));
    if (flood_hop > 0) e.detail["hop"] = flood_hop;
  }
  const BroadcastPlan plan = deliver_broadcast(radio_, from, now_, radio_rng_);
  for (EndpointId lost : plan.lost) {
    const Entity& ent = entities_.at(lost);
    if (ent.kind == EntityKind::BaseStation || ent.kind == EntityKind::Replayer) continue;
    auto& e = emit("drop", entities_.at(from).protocol_id, ent.protocol_id);
    e.detail["type"] = to_string(type);
    e.detail["reason"] = "loss";
  }
  for (const auto& d : plan.deliveries) {
    const Entity& ent = entities_.at(d.receiver);
    if (ent.kind == EntityKind::BaseStation || ent.kind == EntityKind::Replayer) continue;
    schedule(d.arrival, DeliveryEvent{d.receiver, frame, flood_hop});
  }
}

void Simulator::send_uplink(EndpointId from, const SeqResponse& resp) {
  const Bytes frame = encode(resp);
  record_on_air(from, frame);
  const std::uint32_t hops = std::max<std::uint32_t>(1, entities_.at(from).request_hops);
  {
    auto& e = emit_for(from, "tx", kBaseStationId);
    e.detail.update(frame_detail(MsgType::SeqResponse, frame.size() * hops));
    e.detail["hops"] = hops;
  }
  std::bernoulli_distribution lose(radio_.loss_prob);
  SimTime arrival = now_;
  for (std::uint32_t h = 0; h < hops; ++h) {
    if (lose(uplink_rng_)) {
      auto& e = emit("drop", resp.sender, kBaseStationId);
      e.detail["type"] = "SEQ_RESP";
      e.detail["reason"] = "uplink-loss";
      return;
    }
    arrival += hop_latency(radio_, uplink_rng_);
  }
  schedule(arrival, UplinkArrival{frame});
}

// ---------------------------------------------------------------------------

void Simulator::on_boot(EndpointId who) {
  const NodeId id = entities_.at(who).protocol_id;
  const PreloadBundle& bundle = preload_.bundles.at(id - 1);
  auto booted = NodeRuntime::boot(bundle, now_, derive_seed(scenario_.seed, {kStreamNode, id}));
  boot_times_[id] = now_;
  nodes_.emplace(id, std::move(booted.runtime));
  {
    auto& e = emit("boot", id);
    e.detail["timer_ms"] = to_ms(booted.timer_at);
  }
  {
    auto& e = emit("phase", id);
    e.detail["from"] = to_string(NodePhase::PreDeploy);
    e.detail["to"] = to_string(NodePhase::Discovery);
  }
  schedule(booted.timer_at, TimerEvent{who});
  broadcast(who, *booted.hello);
}

void Simulator::on_timer(EndpointId who) {
  NodeRuntime* rt = runtime_of(who);
  if (!rt) return;
  const NodePhase before = rt->phase();
  const auto cluster_msgs = rt->on_tmin_expire(now_);
  if (rt->phase() == before) return;  // not in Discovery any more

  if (entities_.at(who).kind == EntityKind::Node) erase_times_[rt->id()] = now_;
  {
    auto& e = emit_for(who, "erase");
    e.detail["pairwise"] = rt->store().pairwise_keys().size();
  }
  emit_for(who, "cluster_key_generated");
  after_handler(who, before);
  for (const auto& m : cluster_msgs) broadcast(who, m);
}

void Simulator::deliver_to_runtime(EndpointId who, NodeRuntime& rt, const WireMessage& msg) {
  const NodePhase before = rt.phase();
  auto rx = [&](Outcome outcome) {
    auto& e = emit_for(who, "rx");
    e.src = sender_of(msg);
    e.dst = rt.id();
    e.detail["type"] = to_string(type_of(msg));
    e.detail["outcome"] = to_string(outcome);
  };

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          auto handled = rt.handle_hello(m, now_);
          rx(handled.outcome);
          after_handler(who, before);
          if (handled.reply) broadcast(who, *handled.reply);
          if (handled.announce) broadcast(who, *handled.announce);
        } else if constexpr (std::is_same_v<T, Ack>) {
          const Outcome outcome = rt.handle_ack(m, now_);
          rx(outcome);
          if (outcome == Outcome::Accepted) emit_for(who, "pairwise", m.sender);
          after_handler(who, before);
        } else if constexpr (std::is_same_v<T, ClusterKeyMsg>) {
          const Outcome outcome = rt.handle_cluster_key(m);
          rx(outcome);
          if (outcome == Outcome::Accepted) emit_for(who, "cluster_key", m.sender);
          after_handler(who, before);
        } else if constexpr (std::is_same_v<T, SeqRequest>) {
          auto handled = rt.handle_seq_request(m);
          rx(handled.outcome);
          after_handler(who, before);
          if (handled.reply) send_uplink(who, *handled.reply);
        } else if constexpr (std::is_same_v<T, SeqResponse>) {
          rx(Outcome::Ignored);
        } else {
          auto handled = rt.handle_revoke(m);
          rx(handled.outcome);
          if (handled.outcome == Outcome::Accepted) emit_for(who, "revoked", m.revoked);
          after_handler(who, before);
          for (const auto& c : handled.redistribution) broadcast(who, c);
        }
      },
      msg);
}

void Simulator::on_delivery(const DeliveryEvent& ev) {
  Entity& ent = entities_.at(ev.to);

  WireMessage msg;
  try {
    msg = decode(ev.frame);
  } catch (const MalformedMessage& err) {
    auto& e = emit_for(ev.to, "drop");
    e.detail["reason"] = to_string(err.reason());
    return;
  }

  if (ent.kind == EntityKind::FloodAttacker) {
    // Answers every overheard HELLO with an ACK it cannot authenticate.
    if (const auto* hello = std::get_if<Hello>(&msg); hello && hello->sender != ent.protocol_id) {
      Rng rng(derive_seed(scenario_.seed, {kStreamAdversary, *ent.adversary, next_seq_}));
      const Ack forged{ent.protocol_id, hello->sender, hello->nonce, MacTag{random_bytes<8>(rng)}};
      broadcast(ev.to, forged);
    }
    return;
  }

  NodeRuntime* rt = runtime_of(ev.to);
  if (!rt) return;  // not booted yet

  const MsgType type = type_of(msg);
  if (ev.flood_hop > 0 && is_flood_type(type)) {
    if (!ent.floods_seen.insert(ev.frame).second) return;  // relay copy already handled
    if (type == MsgType::SeqRequest) ent.request_hops = ev.flood_hop;
    // Honest nodes relay base-station broadcasts until they are revoked.
    if (ent.kind == EntityKind::Node && rt->phase() != NodePhase::Revoked &&
        rt->phase() != NodePhase::PreDeploy) {
      broadcast(ev.to, ev.frame, ev.flood_hop + 1);
    }
  } else if (is_flood_type(type)) {
    ent.request_hops = std::max<std::uint32_t>(ent.request_hops, 1);
  }
  deliver_to_runtime(ev.to, *rt, msg);
}

void Simulator::on_uplink(const Bytes& frame) {
  const auto resp = std::get<SeqResponse>(decode(frame));
  const bool counted = registry_.ingest_response(resp, now_);
  auto& e = emit("audit_response", resp.sender, kBaseStationId);
  e.detail["round"] = resp.round;
  e.detail["accepted"] = counted;
  e.detail["status"] = to_string(registry_.status(resp.sender));
}

void Simulator::on_audit(bool close) {
  if (!close) {
    SeqRequest req;
    try {
      req = registry_.begin_audit(now_);
    } catch (const ChainExhausted&) {
      emit("chain_exhausted");
      audits_running_ = false;
      return;
    }
    auto& e = emit("audit_begin", kBaseStationId);
    e.detail["round"] = req.round;
    e.detail["audit"] = registry_.audits_started();
    broadcast(kBaseStationId, encode(req), 1);
    schedule(registry_.deadline(), AuditTick{true});
    return;
  }

  const SimTime started = registry_.round_started_at();
  const AuditClose closed = registry_.close_audit(now_);
  for (NodeId u : closed.verdict.verified) {
    auto& e = emit("verdict", u);
    e.detail["round"] = closed.verdict.round;
    e.detail["status"] = "Verified";
  }
  for (const auto& [u, reason] : closed.verdict.flagged) {
    auto& e = emit("verdict", u);
    e.detail["round"] = closed.verdict.round;
    e.detail["status"] = "Flagged";
    e.detail["reason"] = to_string(reason);
  }
  for (const auto& revoke : closed.revocations) {
    auto& e = emit("revoke_issued", kBaseStationId, revoke.revoked);
    e.detail["round"] = closed.verdict.round;
    e.detail["chain_index"] = revoke.round;
    e.detail["audit_began_ms"] = to_ms(started);
    broadcast(kBaseStationId, encode(revoke), 1);
  }

  if (scenario_.audit_period_ms > 0) {
    const SimTime next = started + from_ms(scenario_.audit_period_ms);
    if (next <= horizon_) schedule(next, AuditTick{false});
  }
}

void Simulator::on_adversary(const AdversaryAction& action) {
  if (action.adversary >= scenario_.adversaries.size()) {
    // Frame queued through inject().
    for (const auto& [tape, frame] : replay_tapes_) {
      if (tape != action.adversary) continue;
      auto& e = emit_for(frame.from, "replay");
      e.detail["frames"] = 1;
      broadcast(frame.from, frame.bytes);
    }
    return;
  }

  const EndpointId endpoint = kAdversaryEndpointBase + static_cast<EndpointId>(action.adversary);
  Rng rng(derive_seed(scenario_.seed, {kStreamAdversary, action.adversary, action.step}));
  const auto& cfg = scenario_.adversaries[action.adversary];

  if (const auto* flood = std::get_if<HelloFloodConfig>(&cfg)) {
    broadcast(endpoint, Hello{flood->attacker_id, Nonce{random_bytes<8>(rng)}});
    if (action.step + 1 < flood->count) {
      schedule(now_ + from_ms(flood->interval_ms), AdversaryAction{action.adversary, action.step + 1});
    }
    return;
  }

  if (const auto* clone = std::get_if<CloneConfig>(&cfg)) {
    if (action.step == 0) {
      Bytes dump = capture_node(clone->victim_id, now_);
      auto& e = emit("capture", clone->victim_id);
      e.detail["erased"] = NodeKeyStore::parse_dump(dump).erased();
      e.detail["bytes"] = dump.size();
      captured_[action.adversary] = std::move(dump);
      schedule(now_ + from_ms(clone->activate_delay_ms), AdversaryAction{action.adversary, 1});
      return;
    }
    NodeKeyStore store = NodeKeyStore::parse_dump(captured_.at(action.adversary));
    if (clone->sequence == CloneSequence::Guess) store.override_sequence_number(random_bytes<8>(rng));
    if (eavesdropping_) remember_keys(store);

    const SimTime victim_boot = boot_time(clone->victim_id).value_or(now_);
    auto booted = NodeRuntime::resume(std::move(store), now_, victim_boot + from_ms(scenario_.t_min_ms),
                                      derive_seed(scenario_.seed, {kStreamAdversary, action.adversary, 99}));
    const Position victim_pos = scenario_.positions[clone->victim_id - 1];
    radio_.positions[endpoint] = clone->position.value_or(victim_pos);
    entities_.emplace(endpoint, Entity{EntityKind::Clone, clone->victim_id, action.adversary});
    clone_runtimes_.emplace(endpoint, std::move(booted.runtime));
    {
      auto& e = emit_for(endpoint, "clone_boot");
      e.detail["phase"] = to_string(clone_runtimes_.at(endpoint).phase());
    }
    if (booted.hello) {
      schedule(booted.timer_at, TimerEvent{endpoint});
      broadcast(endpoint, *booted.hello);
    }
    return;
  }

  if (std::holds_alternative<ReplayConfig>(cfg)) {
    if (!entities_.contains(endpoint)) {
      entities_.emplace(endpoint, Entity{EntityKind::Replayer, 0, action.adversary});
      radio_.positions[endpoint] = *scenario_.base_station;
      radio_.tx_multiplier[endpoint] = kReplayTxMultiplier;
    }
    std::vector<Bytes> frames;
    for (const auto& [k, frame] : replay_tapes_) {
      if (k == action.adversary) frames.push_back(frame.bytes);
    }
    auto& e = emit_for(endpoint, "replay");
    e.detail["frames"] = frames.size();
    for (const auto& f : frames) broadcast(endpoint, f);
  }
}

RunTrace run(Scenario scenario, std::optional<std::uint64_t> seed) {
  if (seed) scenario.seed = *seed;
  Simulator sim(std::move(scenario));
  sim.run();
  return sim.trace();
}

}  // namespace leapforge
