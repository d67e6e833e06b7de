#include "doctest.h"
#include "leapforge/keying.hpp"
#include "leapforge/random.hpp"
#include "oracles.hpp"

using namespace leapforge;
using namespace leapforge::testing;

namespace {

PreloadBundle bundle_for(NodeId id, const SymKey& k_in) {
  Rng rng(id);
  const SymKey global(Block16{0xee}, KeyRole::Global);
  PreloadBundle b;
  b.node_id = id;
  b.initial_key = k_in;
  b.individual_key = derive_individual_key(global, id);
  b.global_key = global;
  b.sequence_number = random_bytes<8>(rng);
  b.chain_commitment = Block16{0xcc};
  b.t_min = from_ms(2000);
  return b;
}

}  // namespace

TEST_CASE("node ids encode big-endian") {
  CHECK(encode_node_id(0x0102) == std::array<std::uint8_t, 2>{0x01, 0x02});
}

TEST_CASE("derivations match the frozen reference values") {
  const SymKey global(array_from_hex<16>(kRfcKey), KeyRole::Global);
  CHECK(to_hex(derive_individual_key(global, 1).bytes()) == kPrfRfcKeyId1);
  CHECK(to_hex(derive_individual_key(global, 2).bytes()) == kPrfRfcKeyId2);

  const SymKey k_in(array_from_hex<16>(kInitialKeySeq), KeyRole::Initial);
  const SymKey k9 = derive_master_key(k_in, 9);
  CHECK(to_hex(k9.bytes()) == kMaster9);
  CHECK(to_hex(derive_master_key(k_in, 7).bytes()) == kMaster7);
  const SymKey k79 = derive_pairwise_key(k9, 7);
  CHECK(to_hex(k79.bytes()) == kPair7And9);
  CHECK(k79.role() == KeyRole::Pairwise);
  CHECK(k79.bytes() == reference_pair_key(k_in.bytes(), 7, 9));
}

TEST_CASE("derivations enforce key roles") {
  const SymKey k(Block16{}, KeyRole::Master);
  CHECK_THROWS_AS(derive_individual_key(k, 1), RoleMismatch);
  CHECK_THROWS_AS(derive_master_key(k, 1), RoleMismatch);
  CHECK_THROWS_AS(derive_pairwise_key(SymKey(Block16{}, KeyRole::Initial), 1), RoleMismatch);
}

TEST_CASE("pairwise keys of different pairs differ") {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const SymKey k_in(random_bytes<16>(rng), KeyRole::Initial);
    const SymKey kv = derive_master_key(k_in, 9);
    CHECK(derive_pairwise_key(kv, 7) != derive_pairwise_key(derive_master_key(k_in, 11), 7));
    CHECK(derive_pairwise_key(kv, 7) != derive_pairwise_key(kv, 8));
  }
}

TEST_CASE("cluster keys are fresh per draw") {
  Rng rng(1);
  const SymKey a = generate_cluster_key(rng);
  const SymKey b = generate_cluster_key(rng);
  CHECK(a != b);
  CHECK(a.role() == KeyRole::Cluster);
}

TEST_CASE("NodeKeyStore lifecycle") {
  const SymKey k_in(array_from_hex<16>(kInitialKeySeq), KeyRole::Initial);
  NodeKeyStore store = NodeKeyStore::from_bundle(bundle_for(7, k_in));

  CHECK(store.node_id() == 7);
  CHECK(store.own_master_key() == derive_master_key(k_in, 7));
  CHECK(store.initial_key().has_value());
  CHECK(store.derive_master_key(9).bytes() == array_from_hex<16>(kMaster9));

  SUBCASE("pairwise key rules") {
    CHECK_THROWS_AS(store.set_pairwise_key(7, SymKey(Block16{}, KeyRole::Pairwise)), std::invalid_argument);
    CHECK_THROWS_AS(store.set_pairwise_key(9, SymKey(Block16{}, KeyRole::Master)), RoleMismatch);
    store.set_pairwise_key(9, derive_pairwise_key(store.derive_master_key(9), 7));
    CHECK(store.pairwise_keys().at(9).bytes() == array_from_hex<16>(kPair7And9));
  }

  SUBCASE("erasure removes bootstrap material and is idempotent") {
    store.cache_neighbor_master(9, store.derive_master_key(9));
    store.set_pairwise_key(9, derive_pairwise_key(store.derive_master_key(9), 7));
    store.erase_bootstrap();
    CHECK(store.erased());
    CHECK_FALSE(store.initial_key().has_value());
    CHECK(store.neighbor_master_cache().empty());
    CHECK(store.pairwise_keys().size() == 1);
    CHECK_THROWS_AS(store.derive_master_key(9), BootstrapErased);
    CHECK_THROWS_AS(store.cache_neighbor_master(9, derive_master_key(k_in, 9)), BootstrapErased);
    const Bytes once = store.dump();
    store.erase_bootstrap();
    CHECK(store.dump() == once);
    CHECK_FALSE(contains_window(once, k_in.view()));
    CHECK_FALSE(contains_window(once, derive_master_key(k_in, 9).view()));
  }

  SUBCASE("forget_peer drops every key shared with the peer") {
    store.set_pairwise_key(9, SymKey(Block16{1}, KeyRole::Pairwise));
    store.set_neighbor_cluster_key(9, SymKey(Block16{2}, KeyRole::Cluster));
    CHECK(store.forget_peer(9));
    CHECK(store.pairwise_keys().empty());
    CHECK(store.neighbor_cluster_keys().empty());
    CHECK_FALSE(store.forget_peer(9));
  }
}

TEST_CASE("store dump round trip") {
  const SymKey k_in(Block16{3}, KeyRole::Initial);
  NodeKeyStore store = NodeKeyStore::from_bundle(bundle_for(4, k_in));
  CHECK(NodeKeyStore::parse_dump(store.dump()) == store);

  store.cache_neighbor_master(2, store.derive_master_key(2));
  store.set_pairwise_key(2, SymKey(Block16{5}, KeyRole::Pairwise));
  store.set_pairwise_key(6, SymKey(Block16{6}, KeyRole::Pairwise));
  store.set_own_cluster_key(SymKey(Block16{7}, KeyRole::Cluster));
  store.set_neighbor_cluster_key(6, SymKey(Block16{8}, KeyRole::Cluster));
  CHECK(NodeKeyStore::parse_dump(store.dump()) == store);

  store.erase_bootstrap();
  const Bytes dump = store.dump();
  CHECK(NodeKeyStore::parse_dump(dump) == store);
  CHECK(dump[0] == 'L');

  SUBCASE("malformed dumps are rejected") {
    CHECK_THROWS_AS(NodeKeyStore::parse_dump(Bytes{}), MalformedDump);
    CHECK_THROWS_AS(NodeKeyStore::parse_dump(Bytes(dump.begin(), dump.end() - 1)), MalformedDump);
    Bytes bad_magic = dump;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(NodeKeyStore::parse_dump(bad_magic), MalformedDump);
    Bytes trailing = dump;
    trailing.push_back(0x01);
    CHECK_THROWS_AS(NodeKeyStore::parse_dump(trailing), MalformedDump);
  }
}

TEST_CASE("all_keys lists every secret") {
  const SymKey k_in(Block16{3}, KeyRole::Initial);
  NodeKeyStore store = NodeKeyStore::from_bundle(bundle_for(4, k_in));
  const auto before = store.all_keys();
  CHECK(std::find(before.begin(), before.end(), k_in) != before.end());
  store.erase_bootstrap();
  const auto after = store.all_keys();
  CHECK(after.size() + 1 == before.size());
  for (const auto& k : after) CHECK(contains_window(store.dump(), k.view()));
}

TEST_CASE("preload_network") {
  Rng rng(3);
  const SymKey k_in(Block16{1}, KeyRole::Initial);
  const SymKey global(Block16{2}, KeyRole::Global);
  const NetworkPreload p = preload_network(50, k_in, global, Block16{9}, rng, from_ms(2000));
  REQUIRE(p.bundles.size() == 50);
  std::set<SequenceNumber> seqs;
  for (const auto& b : p.bundles) {
    seqs.insert(b.sequence_number);
    CHECK(p.registry.expected.at(b.node_id) == b.sequence_number);
    CHECK(b.individual_key == derive_individual_key(global, b.node_id));
    CHECK(b.initial_key == k_in);
  }
  CHECK(seqs.size() == 50);
  CHECK(p.bundles.front().node_id == 1);
  CHECK(p.bundles.back().node_id == 50);
}
