#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "leapforge/bytes.hpp"
#include "leapforge/crypto.hpp"
#include "leapforge/random.hpp"
#include "leapforge/sim_time.hpp"

namespace leapforge {

using SequenceNumber = std::array<std::uint8_t, 8>;

/// 2-byte big-endian encoding used as PRF input for node ids.
std::array<std::uint8_t, 2> encode_node_id(NodeId id);

/// IK_u = f_{K_m}(u). Requires the global key.
SymKey derive_individual_key(const SymKey& global_key, NodeId u);
/// K_u = f_{K_in}(u). Requires the initial key.
SymKey derive_master_key(const SymKey& initial_key, NodeId u);
/// K_uv = f_{K_v}(u), where K_v is the master key of the pair's responder.
SymKey derive_pairwise_key(const SymKey& responder_master, NodeId initiator);

SymKey generate_cluster_key(Rng& entropy);
SymKey random_key(Rng& entropy, KeyRole role);

/// The bootstrap material (initial key, neighbour master keys) is gone.
class BootstrapErased : public std::logic_error {
 public:
  BootstrapErased() : std::logic_error("bootstrap key material already erased") {}
};

class MalformedDump : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PreloadBundle {
  NodeId node_id = 0;
  SymKey initial_key{Block16{}, KeyRole::Initial};
  SymKey individual_key{Block16{}, KeyRole::Individual};
  SymKey global_key{Block16{}, KeyRole::Global};
  SequenceNumber sequence_number{};
  Block16 chain_commitment{};
  SimTime t_min{};
};

/// Key material held by one node.
class NodeKeyStore {
 public:
  static NodeKeyStore from_bundle(const PreloadBundle& bundle);

  NodeId node_id() const { return node_id_; }
  const SymKey& individual_key() const { return individual_key_; }
  const SymKey& own_master_key() const { return own_master_key_; }
  const std::optional<SymKey>& initial_key() const { return initial_key_; }
  const SymKey& global_key() const { return global_key_; }
  const SequenceNumber& sequence_number() const { return sequence_number_; }
  const Block16& chain_commitment() const { return chain_commitment_; }
  bool erased() const { return erased_; }

  const std::map<NodeId, SymKey>& neighbor_master_cache() const { return neighbor_master_cache_; }
  const std::map<NodeId, SymKey>& pairwise_keys() const { return pairwise_keys_; }
  const std::optional<SymKey>& own_cluster_key() const { return own_cluster_key_; }
  const std::map<NodeId, SymKey>& neighbor_cluster_keys() const { return neighbor_cluster_keys_; }

  /// Derives a neighbour's master key from the still-present initial key.
  /// Throws BootstrapErased after erase_bootstrap().
  SymKey derive_master_key(NodeId neighbor) const;

  /// Throws BootstrapErased after erasure.
  void cache_neighbor_master(NodeId neighbor, const SymKey& master);
  /// Rejects the node's own id and non-pairwise keys.
  void set_pairwise_key(NodeId peer, const SymKey& key);
  void set_own_cluster_key(const SymKey& key);
  void set_neighbor_cluster_key(NodeId peer, const SymKey& key);
  /// Drops every key shared with `peer`. Returns true if anything was held.
  bool forget_peer(NodeId peer);

  /// Removes the initial key and every cached neighbour master key. Idempotent.
  void erase_bootstrap();

  /// Test-support and clone-adversary hook: replaces the secret sequence number.
  void override_sequence_number(const SequenceNumber& seq) { sequence_number_ = seq; }

  /// Diagnostic byte dump, see docs/keystore_dump.md.
  Bytes dump() const;
  static NodeKeyStore parse_dump(ByteView dump);

  /// Every 16-byte secret in the store, in dump order.
  std::vector<SymKey> all_keys() const;

  friend bool operator==(const NodeKeyStore&, const NodeKeyStore&) = default;

 private:
  NodeKeyStore(NodeId id, const SymKey& individual, const SymKey& own_master,
               const SymKey& global)
      : node_id_(id), individual_key_(individual), own_master_key_(own_master), global_key_(global) {}

  NodeId node_id_;
  SymKey individual_key_;
  SymKey own_master_key_;
  std::optional<SymKey> initial_key_;
  std::map<NodeId, SymKey> neighbor_master_cache_;
  std::map<NodeId, SymKey> pairwise_keys_;
  std::optional<SymKey> own_cluster_key_;
  std::map<NodeId, SymKey> neighbor_cluster_keys_;
  SymKey global_key_;
  SequenceNumber sequence_number_{};
  Block16 chain_commitment_{};
  bool erased_ = false;
};

/// What the base station keeps after preloading: the global key and each
/// node's expected sequence number.
struct RegistrySeed {
  SymKey global_key{Block16{}, KeyRole::Global};
  std::map<NodeId, SequenceNumber> expected;
};

struct NetworkPreload {
  std::vector<PreloadBundle> bundles;
  RegistrySeed registry;
};

/// Builds bundles for nodes 1..n with distinct random sequence numbers.
NetworkPreload preload_network(std::size_t n, const SymKey& initial_key, const SymKey& global_key,
                               const Block16& chain_commitment, Rng& entropy, SimTime t_min);

}  // namespace leapforge
