#include "leapforge/node.hpp"

#include <algorithm>

namespace leapforge {

std::string_view to_string(NodePhase phase) {
  switch (phase) {
    case NodePhase::PreDeploy: return "PreDeploy";
    case NodePhase::Discovery: return "Discovery";
    case NodePhase::Operational: return "Operational";
    case NodePhase::Revoked: return "Revoked";
  }
  return "Unknown";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted: return "accepted";
    case Outcome::Ignored: return "ignored";
    case Outcome::NotAddressed: return "not-addressed";
    case Outcome::Silent: return "silent";
    case Outcome::RevokedSender: return "revoked-sender";
    case Outcome::MacFailure: return "mac-failure";
    case Outcome::NonceMismatch: return "nonce-mismatch";
    case Outcome::Duplicate: return "duplicate";
    case Outcome::BootstrapErased: return "bootstrap-erased";
    case Outcome::AuthFailure: return "auth-failure";
    case Outcome::UnknownSender: return "unknown-sender";
    case Outcome::ChainFailure: return "chain-failure";
    case Outcome::StaleRound: return "stale-round";
  }
  return "unknown";
}

std::array<std::uint8_t, 4> cluster_key_context(NodeId sender, NodeId dest) {
  return {static_cast<std::uint8_t>(sender >> 8), static_cast<std::uint8_t>(sender),
          static_cast<std::uint8_t>(dest >> 8), static_cast<std::uint8_t>(dest)};
}

std::array<std::uint8_t, 6> seq_response_context(NodeId node, std::uint32_t round) {
  return {static_cast<std::uint8_t>(node >> 8),   static_cast<std::uint8_t>(node),
          static_cast<std::uint8_t>(round >> 24), static_cast<std::uint8_t>(round >> 16),
          static_cast<std::uint8_t>(round >> 8),  static_cast<std::uint8_t>(round)};
}

Block16 pad_sequence(const SequenceNumber& seq) {
  Block16 out{};
  std::copy(seq.begin(), seq.end(), out.begin());
  return out;
}

NodeRuntime::Booted NodeRuntime::boot(const PreloadBundle& bundle, SimTime now,
                                      std::uint64_t entropy_seed) {
  NodeRuntime rt(NodeKeyStore::from_bundle(bundle), entropy_seed);
  rt.set_phase(NodePhase::Discovery);
  rt.timer_at_ = now + bundle.t_min;
  const Hello hello = rt.new_hello(now);
  const SimTime timer = rt.timer_at_;
  return Booted{std::move(rt), hello, timer};
}

NodeRuntime::Booted NodeRuntime::resume(NodeKeyStore store, SimTime now, SimTime erase_deadline,
                                        std::uint64_t entropy_seed) {
  const bool erased = store.erased();
  NodeRuntime rt(std::move(store), entropy_seed);
  rt.set_phase(NodePhase::Discovery);
  if (erased) {
    rt.set_phase(NodePhase::Operational);
    rt.timer_at_ = now;
    return Booted{std::move(rt), std::nullopt, now};
  }
  rt.timer_at_ = std::max(now, erase_deadline);
  const Hello hello = rt.new_hello(now);
  const SimTime timer = rt.timer_at_;
  return Booted{std::move(rt), hello, timer};
}

Hello NodeRuntime::new_hello(SimTime now) {
  Nonce nonce{random_bytes<8>(entropy_)};
  while (pending_hellos_.contains(nonce)) nonce = Nonce{random_bytes<8>(entropy_)};
  pending_hellos_.emplace(nonce, now);
  return Hello{id(), nonce};
}

void NodeRuntime::set_phase(NodePhase next) {
  const bool ok = (phase_ == NodePhase::PreDeploy && next == NodePhase::Discovery) ||
                  (phase_ == NodePhase::Discovery && next == NodePhase::Operational) ||
                  (phase_ != NodePhase::Revoked && next == NodePhase::Revoked);
  if (!ok) {
    throw InvariantViolation("illegal phase transition " + std::string(to_string(phase_)) + " -> " +
                             std::string(to_string(next)));
  }
  phase_ = next;
  phase_history_.push_back(next);
}

HelloHandled NodeRuntime::handle_hello(const Hello& hello, SimTime now) {
  if (phase_ == NodePhase::Revoked) return {Outcome::Silent};
  if (hello.sender == id() || hello.sender == kBaseStationId) return {Outcome::Ignored};
  if (revoked_.contains(hello.sender)) {
    ++counters_.from_revoked;
    return {Outcome::RevokedSender};
  }
  if (phase_ != NodePhase::Discovery) {
    ++counters_.hellos_ignored;
    return {Outcome::Ignored};
  }
  Ack ack{id(), hello.sender, hello.nonce, MacTag{}};
  ack.tag = mac(store_.own_master_key(), ack_body(ack));
  HelloHandled out{Outcome::Accepted, ack, std::nullopt};
  if (!store_.pairwise_keys().contains(hello.sender) && announced_to_.insert(hello.sender).second) {
    out.announce = new_hello(now);
  }
  return out;
}

Outcome NodeRuntime::handle_ack(const Ack& ack, SimTime /*now*/) {
  if (phase_ == NodePhase::Revoked) return Outcome::Silent;
  if (ack.dest != id()) return Outcome::NotAddressed;
  if (ack.sender == id() || ack.sender == kBaseStationId) return Outcome::Ignored;
  if (revoked_.contains(ack.sender)) {
    ++counters_.from_revoked;
    return Outcome::RevokedSender;
  }
  if (phase_ != NodePhase::Discovery || store_.erased()) {
    ++counters_.bootstrap_erased;
    return Outcome::BootstrapErased;
  }

  const SymKey responder_master = store_.derive_master_key(ack.sender);
  if (!verify_mac(responder_master, ack_body(ack), ack.tag)) {
    ++counters_.mac_failures;
    return Outcome::MacFailure;
  }
  if (!pending_hellos_.contains(ack.nonce)) {
    ++counters_.replays;
    return Outcome::NonceMismatch;
  }
  if (store_.pairwise_keys().contains(ack.sender)) {
    ++counters_.replays;
    return Outcome::Duplicate;
  }

  // One key per unordered pair: the lower id is the initiator u, the higher
  // id the responder v, and K_uv = f_{K_v}(u) on both ends.
  const SymKey key = id() < ack.sender ? derive_pairwise_key(responder_master, id())
                                       : derive_pairwise_key(store_.own_master_key(), ack.sender);
  store_.cache_neighbor_master(ack.sender, responder_master);
  store_.set_pairwise_key(ack.sender, key);
  return Outcome::Accepted;
}

std::vector<ClusterKeyMsg> NodeRuntime::distribute_cluster_key() {
  store_.set_own_cluster_key(generate_cluster_key(entropy_));
  std::vector<ClusterKeyMsg> out;
  for (const auto& [peer, pairwise] : store_.pairwise_keys()) {
    if (revoked_.contains(peer)) continue;
    out.push_back(ClusterKeyMsg{
        id(), peer, wrap_key(pairwise, *store_.own_cluster_key(), cluster_key_context(id(), peer))});
  }
  return out;
}

std::vector<ClusterKeyMsg> NodeRuntime::on_tmin_expire(SimTime /*now*/) {
  if (phase_ != NodePhase::Discovery) return {};
  store_.erase_bootstrap();
  pending_hellos_.clear();
  announced_to_.clear();
  set_phase(NodePhase::Operational);
  return distribute_cluster_key();
}

Outcome NodeRuntime::handle_cluster_key(const ClusterKeyMsg& msg) {
  if (phase_ == NodePhase::Revoked) return Outcome::Silent;
  if (msg.dest != id()) return Outcome::NotAddressed;
  if (revoked_.contains(msg.sender)) {
    ++counters_.from_revoked;
    return Outcome::RevokedSender;
  }
  const auto it = store_.pairwise_keys().find(msg.sender);
  if (it == store_.pairwise_keys().end()) {
    ++counters_.unknown_senders;
    return Outcome::UnknownSender;
  }
  try {
    store_.set_neighbor_cluster_key(
        msg.sender, unwrap_key(it->second, msg.blob, cluster_key_context(msg.sender, msg.dest),
                               KeyRole::Cluster));
  } catch (const AuthenticationFailure&) {
    ++counters_.auth_failures;
    return Outcome::AuthFailure;
  }
  return Outcome::Accepted;
}

Handled<SeqResponse> NodeRuntime::handle_seq_request(const SeqRequest& req) {
  if (phase_ == NodePhase::Revoked) return {Outcome::Silent, std::nullopt};
  // Audits start once pairwise establishment is over.
  if (phase_ != NodePhase::Operational) return {Outcome::Ignored, std::nullopt};
  if (req.round <= last_chain_index_) {
    ++counters_.stale_rounds;
    return {Outcome::StaleRound, std::nullopt};
  }
  if (!chain_verify(req.chain_element, store_.chain_commitment(), req.round)) {
    ++counters_.chain_failures;
    return {Outcome::ChainFailure, std::nullopt};
  }
  last_chain_index_ = req.round;
  SeqResponse resp{id(), req.round,
                   wrap_block(store_.individual_key(), pad_sequence(store_.sequence_number()),
                              seq_response_context(id(), req.round))};
  return {Outcome::Accepted, resp};
}

RevokeHandled NodeRuntime::handle_revoke(const Revoke& revoke) {
  if (phase_ == NodePhase::Revoked) return {Outcome::Silent, {}};
  if (!verify_mac(store_.global_key(), revoke_body(revoke), revoke.tag)) {
    ++counters_.auth_failures;
    return {Outcome::AuthFailure, {}};
  }
  if (!chain_verify(revoke.chain_element, store_.chain_commitment(), revoke.round)) {
    ++counters_.chain_failures;
    return {Outcome::ChainFailure, {}};
  }
  if (revoked_.contains(revoke.revoked)) return {Outcome::Duplicate, {}};

  revoked_.insert(revoke.revoked);
  last_chain_index_ = std::max(last_chain_index_, revoke.round);

  if (revoke.revoked == id()) {
    set_phase(NodePhase::Revoked);
    return {Outcome::Accepted, {}};
  }
  const bool was_neighbor = store_.pairwise_keys().contains(revoke.revoked);
  store_.forget_peer(revoke.revoked);
  RevokeHandled out{Outcome::Accepted, {}};
  if (was_neighbor && phase_ == NodePhase::Operational) out.redistribution = distribute_cluster_key();
  return out;
}

}  // namespace leapforge
