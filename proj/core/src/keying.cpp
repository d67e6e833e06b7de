#include "leapforge/keying.hpp"

#include <set>

namespace leapforge {

std::array<std::uint8_t, 2> encode_node_id(NodeId id) {
  return {static_cast<std::uint8_t>(id >> 8), static_cast<std::uint8_t>(id)};
}

SymKey derive_individual_key(const SymKey& global_key, NodeId u) {
  require_role(global_key, KeyRole::Global, "derive_individual_key");
  return prf(global_key, encode_node_id(u), KeyRole::Individual);
}

SymKey derive_master_key(const SymKey& initial_key, NodeId u) {
  require_role(initial_key, KeyRole::Initial, "derive_master_key");
  return prf(initial_key, encode_node_id(u), KeyRole::Master);
}

SymKey derive_pairwise_key(const SymKey& responder_master, NodeId initiator) {
  require_role(responder_master, KeyRole::Master, "derive_pairwise_key");
  return prf(responder_master, encode_node_id(initiator), KeyRole::Pairwise);
}

SymKey random_key(Rng& entropy, KeyRole role) { return SymKey(random_bytes<16>(entropy), role); }

SymKey generate_cluster_key(Rng& entropy) { return random_key(entropy, KeyRole::Cluster); }

// ---------------------------------------------------------------------------

NodeKeyStore NodeKeyStore::from_bundle(const PreloadBundle& bundle) {
  require_role(bundle.initial_key, KeyRole::Initial, "NodeKeyStore::from_bundle");
  require_role(bundle.individual_key, KeyRole::Individual, "NodeKeyStore::from_bundle");
  require_role(bundle.global_key, KeyRole::Global, "NodeKeyStore::from_bundle");
  NodeKeyStore store(bundle.node_id, bundle.individual_key,
                     leapforge::derive_master_key(bundle.initial_key, bundle.node_id),
                     bundle.global_key);
  store.initial_key_ = bundle.initial_key;
  store.sequence_number_ = bundle.sequence_number;
  store.chain_commitment_ = bundle.chain_commitment;
  return store;
}

SymKey NodeKeyStore::derive_master_key(NodeId neighbor) const {
  if (erased_ || !initial_key_) throw BootstrapErased();
  return leapforge::derive_master_key(*initial_key_, neighbor);
}

void NodeKeyStore::cache_neighbor_master(NodeId neighbor, const SymKey& master) {
  if (erased_) throw BootstrapErased();
  require_role(master, KeyRole::Master, "cache_neighbor_master");
  neighbor_master_cache_.insert_or_assign(neighbor, master);
}

void NodeKeyStore::set_pairwise_key(NodeId peer, const SymKey& key) {
  if (peer == node_id_) throw std::invalid_argument("pairwise key with self");
  require_role(key, KeyRole::Pairwise, "set_pairwise_key");
  pairwise_keys_.insert_or_assign(peer, key);
}

void NodeKeyStore::set_own_cluster_key(const SymKey& key) {
  require_role(key, KeyRole::Cluster, "set_own_cluster_key");
  own_cluster_key_ = key;
}

void NodeKeyStore::set_neighbor_cluster_key(NodeId peer, const SymKey& key) {
  require_role(key, KeyRole::Cluster, "set_neighbor_cluster_key");
  neighbor_cluster_keys_.insert_or_assign(peer, key);
}

bool NodeKeyStore::forget_peer(NodeId peer) {
  const bool had = pairwise_keys_.erase(peer) + neighbor_cluster_keys_.erase(peer) +
                       neighbor_master_cache_.erase(peer) >
                   0;
  return had;
}

void NodeKeyStore::erase_bootstrap() {
  initial_key_.reset();
  neighbor_master_cache_.clear();
  erased_ = true;
}

// ---------------------------------------------------------------------------
// Dump format: "LFKS" 0x01, then fields of tag(1) | length(u16 LE) | value.

namespace {

constexpr std::array<std::uint8_t, 5> kDumpHeader{'L', 'F', 'K', 'S', 0x01};

enum DumpTag : std::uint8_t {
  kTagNodeId = 0x01,
  kTagIndividual = 0x02,
  kTagOwnMaster = 0x03,
  kTagInitial = 0x04,
  kTagNeighborMaster = 0x05,
  kTagPairwise = 0x06,
  kTagOwnCluster = 0x07,
  kTagNeighborCluster = 0x08,
  kTagGlobal = 0x09,
  kTagSequence = 0x0a,
  kTagCommitment = 0x0b,
  kTagErased = 0x0c,
};

void put_field(Bytes& out, std::uint8_t tag, ByteView value) {
  out.push_back(tag);
  out.push_back(static_cast<std::uint8_t>(value.size()));
  out.push_back(static_cast<std::uint8_t>(value.size() >> 8));
  append(out, value);
}

void put_entry(Bytes& out, std::uint8_t tag, NodeId peer, const SymKey& key) {
  Bytes value;
  put_u16_be(value, peer);
  append(value, key.view());
  put_field(out, tag, value);
}

}  // namespace

Bytes NodeKeyStore::dump() const {
  Bytes out(kDumpHeader.begin(), kDumpHeader.end());
  put_field(out, kTagNodeId, encode_node_id(node_id_));
  put_field(out, kTagIndividual, individual_key_.view());
  put_field(out, kTagOwnMaster, own_master_key_.view());
  if (initial_key_) put_field(out, kTagInitial, initial_key_->view());
  for (const auto& [peer, key] : neighbor_master_cache_) put_entry(out, kTagNeighborMaster, peer, key);
  for (const auto& [peer, key] : pairwise_keys_) put_entry(out, kTagPairwise, peer, key);
  if (own_cluster_key_) put_field(out, kTagOwnCluster, own_cluster_key_->view());
  for (const auto& [peer, key] : neighbor_cluster_keys_) put_entry(out, kTagNeighborCluster, peer, key);
  put_field(out, kTagGlobal, global_key_.view());
  put_field(out, kTagSequence, sequence_number_);
  put_field(out, kTagCommitment, chain_commitment_);
  const std::uint8_t erased = erased_ ? 1 : 0;
  put_field(out, kTagErased, ByteView(&erased, 1));
  return out;
}

NodeKeyStore NodeKeyStore::parse_dump(ByteView dump) {
  if (dump.size() < kDumpHeader.size() ||
      !std::equal(kDumpHeader.begin(), kDumpHeader.end(), dump.begin())) {
    throw MalformedDump("bad key store dump header");
  }
  std::optional<NodeId> node_id;
  std::optional<SymKey> individual, own_master, initial, own_cluster, global;
  std::optional<SequenceNumber> sequence;
  std::optional<Block16> commitment;
  std::optional<bool> erased;
  std::map<NodeId, SymKey> masters, pairwise, clusters;

  auto expect_len = [](std::size_t got, std::size_t want) {
    if (got != want) throw MalformedDump("field has wrong length");
  };
  auto once = [](bool already) {
    if (already) throw MalformedDump("duplicate field");
  };

  std::size_t pos = kDumpHeader.size();
  while (pos < dump.size()) {
    if (dump.size() - pos < 3) throw MalformedDump("truncated field header");
    const std::uint8_t tag = dump[pos];
    const std::size_t len = dump[pos + 1] | (std::size_t{dump[pos + 2]} << 8);
    pos += 3;
    if (dump.size() - pos < len) throw MalformedDump("truncated field value");
    const ByteView value = dump.subspan(pos, len);
    pos += len;

    auto entry = [&](std::map<NodeId, SymKey>& into, KeyRole role) {
      expect_len(len, 18);
      into.insert_or_assign(get_u16_be(value, 0), SymKey::from_bytes(value.subspan(2), role));
    };

    switch (tag) {
      case kTagNodeId:
        expect_len(len, 2);
        once(node_id.has_value());
        node_id = get_u16_be(value, 0);
        break;
      case kTagIndividual:
        expect_len(len, 16);
        once(individual.has_value());
        individual = SymKey::from_bytes(value, KeyRole::Individual);
        break;
      case kTagOwnMaster:
        expect_len(len, 16);
        once(own_master.has_value());
        own_master = SymKey::from_bytes(value, KeyRole::Master);
        break;
      case kTagInitial:
        expect_len(len, 16);
        once(initial.has_value());
        initial = SymKey::from_bytes(value, KeyRole::Initial);
        break;
      case kTagNeighborMaster: entry(masters, KeyRole::Master); break;
      case kTagPairwise: entry(pairwise, KeyRole::Pairwise); break;
      case kTagOwnCluster:
        expect_len(len, 16);
        once(own_cluster.has_value());
        own_cluster = SymKey::from_bytes(value, KeyRole::Cluster);
        break;
      case kTagNeighborCluster: entry(clusters, KeyRole::Cluster); break;
      case kTagGlobal:
        expect_len(len, 16);
        once(global.has_value());
        global = SymKey::from_bytes(value, KeyRole::Global);
        break;
      case kTagSequence: {
        expect_len(len, 8);
        once(sequence.has_value());
        SequenceNumber seq{};
        std::copy(value.begin(), value.end(), seq.begin());
        sequence = seq;
        break;
      }
      case kTagCommitment: {
        expect_len(len, 16);
        once(commitment.has_value());
        Block16 c{};
        std::copy(value.begin(), value.end(), c.begin());
        commitment = c;
        break;
      }
      case kTagErased:
        expect_len(len, 1);
        once(erased.has_value());
        if (value[0] > 1) throw MalformedDump("erased flag must be 0 or 1");
        erased = value[0] == 1;
        break;
      default: throw MalformedDump("unknown field tag");
    }
  }

  if (!node_id || !individual || !own_master || !global || !sequence || !commitment || !erased) {
    throw MalformedDump("missing required field");
  }
  if (*erased && (initial || !masters.empty())) {
    throw MalformedDump("erased store still holds bootstrap keys");
  }
  if (pairwise.contains(*node_id)) throw MalformedDump("pairwise key with self");

  NodeKeyStore store(*node_id, *individual, *own_master, *global);
  store.initial_key_ = initial;
  store.neighbor_master_cache_ = std::move(masters);
  store.pairwise_keys_ = std::move(pairwise);
  store.own_cluster_key_ = own_cluster;
  store.neighbor_cluster_keys_ = std::move(clusters);
  store.sequence_number_ = *sequence;
  store.chain_commitment_ = *commitment;
  store.erased_ = *erased;
  return store;
}

std::vector<SymKey> NodeKeyStore::all_keys() const {
  std::vector<SymKey> keys{individual_key_, own_master_key_};
  if (initial_key_) keys.push_back(*initial_key_);
  for (const auto& [peer, key] : neighbor_master_cache_) keys.push_back(key);
  for (const auto& [peer, key] : pairwise_keys_) keys.push_back(key);
  if (own_cluster_key_) keys.push_back(*own_cluster_key_);
  for (const auto& [peer, key] : neighbor_cluster_keys_) keys.push_back(key);
  keys.push_back(global_key_);
  return keys;
}

// ---------------------------------------------------------------------------

NetworkPreload preload_network(std::size_t n, const SymKey& initial_key, const SymKey& global_key,
                               const Block16& chain_commitment, Rng& entropy, SimTime t_min) {
  if (n < 1 || n >= 0xffff) throw std::invalid_argument("node count must be in [1, 65534]");
  require_role(initial_key, KeyRole::Initial, "preload_network");
  require_role(global_key, KeyRole::Global, "preload_network");

  NetworkPreload out;
  out.registry.global_key = global_key;
  std::set<SequenceNumber> used;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto id = static_cast<NodeId>(i);
    SequenceNumber seq{};
    do {
      seq = random_bytes<8>(entropy);
    } while (!used.insert(seq).second);

    PreloadBundle bundle;
    bundle.node_id = id;
    bundle.initial_key = initial_key;
    bundle.individual_key = derive_individual_key(global_key, id);
    bundle.global_key = global_key;
    bundle.sequence_number = seq;
    bundle.chain_commitment = chain_commitment;
    bundle.t_min = t_min;
    out.registry.expected.emplace(id, seq);
    out.bundles.push_back(bundle);
  }
  return out;
}

}  // namespace leapforge
