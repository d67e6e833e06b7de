#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "leapforge/keying.hpp"
#include "leapforge/random.hpp"
#include "leapforge/sim_time.hpp"
#include "leapforge/wire.hpp"

namespace leapforge {

enum class NodePhase : std::uint8_t { PreDeploy, Discovery, Operational, Revoked };

std::string_view to_string(NodePhase phase);

/// A protocol state machine reached a state its invariants forbid.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Why a handler accepted or dropped a message.
enum class Outcome : std::uint8_t {
  Accepted,
  Ignored,          // phase gate or self-addressed traffic
  NotAddressed,     // overheard unicast for another node
  Silent,           // this node has been revoked
  RevokedSender,
  MacFailure,
  NonceMismatch,
  Duplicate,
  BootstrapErased,
  AuthFailure,
  UnknownSender,
  ChainFailure,
  StaleRound,
};

std::string_view to_string(Outcome outcome);

template <typename Msg>
struct Handled {
  Outcome outcome = Outcome::Ignored;
  std::optional<Msg> reply;
};

/// Reply to a HELLO. A node that has no key with the sender yet also
/// announces itself once more, since the sender may have booted after the
/// node's first HELLO went out.
struct HelloHandled {
  Outcome outcome = Outcome::Ignored;
  std::optional<Ack> reply{};
  std::optional<Hello> announce{};
};

struct RevokeHandled {
  Outcome outcome = Outcome::Ignored;
  /// Fresh cluster key for the remaining neighbours, if the revoked id was one.
  std::vector<ClusterKeyMsg> redistribution;
};

struct NodeCounters {
  std::uint64_t mac_failures = 0;
  std::uint64_t replays = 0;  // nonce mismatches and duplicate ACKs
  std::uint64_t bootstrap_erased = 0;
  std::uint64_t auth_failures = 0;
  std::uint64_t unknown_senders = 0;
  std::uint64_t chain_failures = 0;
  std::uint64_t stale_rounds = 0;
  std::uint64_t hellos_ignored = 0;
  std::uint64_t from_revoked = 0;
};

/// Per-node protocol state machine. Handlers are synchronous:
/// (state, message, time) -> (state, emissions).
class NodeRuntime {
 public:
  struct Booted;

  /// PreDeploy -> Discovery. Emits a HELLO with a fresh nonce and arms the
  /// erasure timer at now + t_min.
  static Booted boot(const PreloadBundle& bundle, SimTime now, std::uint64_t entropy_seed);

  /// Starts a runtime from a captured store (clone adversary). A store that
  /// still holds its bootstrap keys enters Discovery and announces itself;
  /// an erased one starts Operational.
  static Booted resume(NodeKeyStore store, SimTime now, SimTime erase_deadline,
                       std::uint64_t entropy_seed);

  HelloHandled handle_hello(const Hello& hello, SimTime now);
  Outcome handle_ack(const Ack& ack, SimTime now);
  /// Discovery -> Operational: erases bootstrap keys and hands a fresh
  /// cluster key to every pairwise neighbour.
  std::vector<ClusterKeyMsg> on_tmin_expire(SimTime now);
  Outcome handle_cluster_key(const ClusterKeyMsg& msg);
  Handled<SeqResponse> handle_seq_request(const SeqRequest& req);
  RevokeHandled handle_revoke(const Revoke& revoke);

  NodeId id() const { return store_.node_id(); }
  NodePhase phase() const { return phase_; }
  const NodeKeyStore& store() const { return store_; }
  const std::map<Nonce, SimTime>& pending_hellos() const { return pending_hellos_; }
  SimTime timer_at() const { return timer_at_; }
  const std::set<NodeId>& revoked_set() const { return revoked_; }
  std::uint32_t last_chain_index() const { return last_chain_index_; }
  const NodeCounters& counters() const { return counters_; }
  const std::vector<NodePhase>& phase_history() const { return phase_history_; }

 private:
  NodeRuntime(NodeKeyStore store, std::uint64_t entropy_seed)
      : store_(std::move(store)), entropy_(entropy_seed) {}

  Hello new_hello(SimTime now);
  void set_phase(NodePhase next);
  std::vector<ClusterKeyMsg> distribute_cluster_key();

  NodeKeyStore store_;
  NodePhase phase_ = NodePhase::PreDeploy;
  std::map<Nonce, SimTime> pending_hellos_;
  std::set<NodeId> announced_to_;
  SimTime timer_at_{};
  std::set<NodeId> revoked_;
  std::uint32_t last_chain_index_ = 0;
  NodeCounters counters_;
  std::vector<NodePhase> phase_history_{NodePhase::PreDeploy};
  Rng entropy_;
};

struct NodeRuntime::Booted {
  NodeRuntime runtime;
  std::optional<Hello> hello;
  SimTime timer_at;
};

/// Context bound into a CLUSTER_KEY blob: sender id || destination id.
std::array<std::uint8_t, 4> cluster_key_context(NodeId sender, NodeId dest);
/// Context bound into a SEQ_RESP blob: node id || round.
std::array<std::uint8_t, 6> seq_response_context(NodeId node, std::uint32_t round);
/// The 8-byte sequence number zero-padded to one block.
Block16 pad_sequence(const SequenceNumber& seq);

}  // namespace leapforge
