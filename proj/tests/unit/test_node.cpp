#include "doctest.h"
#include "leapforge/node.hpp"
#include "oracles.hpp"

using namespace leapforge;
using namespace leapforge::testing;

namespace {

struct Fixture {
  SymKey k_in{array_from_hex<16>(kInitialKeySeq), KeyRole::Initial};
  SymKey global{Block16{0x42}, KeyRole::Global};
  HashChain chain = HashChain::build(Block16{0x99}, 16);

  PreloadBundle bundle(NodeId id) const {
    PreloadBundle b;
    b.node_id = id;
    b.initial_key = k_in;
    b.individual_key = derive_individual_key(global, id);
    b.global_key = global;
    b.sequence_number = SequenceNumber{static_cast<std::uint8_t>(id), 1, 2, 3, 4, 5, 6, 7};
    b.chain_commitment = chain.commitment();
    b.t_min = from_ms(2000);
    return b;
  }

  NodeRuntime::Booted boot(NodeId id, SimTime at = SimTime{0}) const {
    return NodeRuntime::boot(bundle(id), at, 1000 + id);
  }

  Revoke revoke(NodeId who, std::uint32_t index) const {
    Revoke r{who, index, chain.element(index), MacTag{}};
    r.tag = mac(global, revoke_body(r));
    return r;
  }
};

// u sends HELLO, v answers, u verifies.
Outcome handshake(NodeRuntime& u, const Hello& hello, NodeRuntime& v) {
  const auto handled = v.handle_hello(hello, SimTime{0});
  REQUIRE(handled.reply.has_value());
  return u.handle_ack(*handled.reply, SimTime{0});
}

}  // namespace

TEST_CASE("boot announces and arms the T_min timer") {
  const Fixture f;
  auto booted = f.boot(5, from_ms(100));
  CHECK(booted.runtime.phase() == NodePhase::Discovery);
  REQUIRE(booted.hello.has_value());
  CHECK(booted.hello->sender == 5);
  CHECK(booted.timer_at == from_ms(2100));
  CHECK(booted.runtime.pending_hellos().contains(booted.hello->nonce));
  CHECK(encode(*booted.hello).size() == 11);
}

TEST_CASE("HELLO/ACK establishes one identical key per pair") {
  const Fixture f;
  auto u = f.boot(7);
  auto v = f.boot(9);

  const auto handled = v.runtime.handle_hello(*u.hello, SimTime{0});
  REQUIRE(handled.reply);
  const Ack& ack = *handled.reply;
  CHECK(ack.sender == 9);
  CHECK(ack.dest == 7);
  CHECK(ack.nonce == u.hello->nonce);
  CHECK(ack.tag == mac(derive_master_key(f.k_in, 9), ack_body(ack)));
  // v has not authenticated u yet, so it announces itself instead of storing.
  CHECK(v.runtime.store().pairwise_keys().empty());
  REQUIRE(handled.announce);

  CHECK(u.runtime.handle_ack(ack, SimTime{0}) == Outcome::Accepted);
  CHECK(u.runtime.store().pairwise_keys().at(9).bytes() == array_from_hex<16>(kPair7And9));

  CHECK(handshake(v.runtime, *handled.announce, u.runtime) == Outcome::Accepted);
  CHECK(v.runtime.store().pairwise_keys().at(7) == u.runtime.store().pairwise_keys().at(9));

  SUBCASE("a second ACK for the same pair is a duplicate") {
    CHECK(handshake(u.runtime, *u.hello, v.runtime) == Outcome::Duplicate);
  }
}

TEST_CASE("ACK verification failures") {
  const Fixture f;
  auto u = f.boot(7);
  auto v = f.boot(9);
  Ack ack = *v.runtime.handle_hello(*u.hello, SimTime{0}).reply;

  SUBCASE("forged tag") {
    ack.tag.bytes[0] ^= 1;
    CHECK(u.runtime.handle_ack(ack, SimTime{0}) == Outcome::MacFailure);
    CHECK(u.runtime.counters().mac_failures == 1);
  }
  SUBCASE("unknown nonce") {
    ack.nonce.bytes[0] ^= 1;
    ack.tag = mac(derive_master_key(f.k_in, 9), ack_body(ack));
    CHECK(u.runtime.handle_ack(ack, SimTime{0}) == Outcome::NonceMismatch);
  }
  SUBCASE("tag from a key not derived from K_in") {
    ack.tag = mac(SymKey(Block16{1}, KeyRole::Master), ack_body(ack));
    CHECK(u.runtime.handle_ack(ack, SimTime{0}) == Outcome::MacFailure);
  }
  SUBCASE("overheard ACK for someone else") {
    ack.dest = 8;
    CHECK(u.runtime.handle_ack(ack, SimTime{0}) == Outcome::NotAddressed);
  }
  CHECK(u.runtime.store().pairwise_keys().empty());
}

TEST_CASE("T_min expiry erases bootstrap keys and distributes the cluster key") {
  const Fixture f;
  auto u = f.boot(7);
  auto v = f.boot(9);
  REQUIRE(handshake(u.runtime, *u.hello, v.runtime) == Outcome::Accepted);
  const auto back = v.runtime.handle_hello(*u.hello, SimTime{0});
  REQUIRE(handshake(v.runtime, *v.hello, u.runtime) == Outcome::Accepted);
  (void)back;

  const auto msgs = u.runtime.on_tmin_expire(from_ms(2000));
  CHECK(u.runtime.phase() == NodePhase::Operational);
  CHECK(u.runtime.store().erased());
  CHECK(u.runtime.pending_hellos().empty());
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].dest == 9);
  CHECK(u.runtime.on_tmin_expire(from_ms(2001)).empty());

  CHECK(v.runtime.handle_cluster_key(msgs[0]) == Outcome::Accepted);
  CHECK(v.runtime.store().neighbor_cluster_keys().at(7) == *u.runtime.store().own_cluster_key());

  SUBCASE("operational nodes ignore HELLOs and late ACKs") {
    auto w = f.boot(11);
    const auto r = u.runtime.handle_hello(*w.hello, from_ms(2500));
    CHECK(r.outcome == Outcome::Ignored);
    CHECK_FALSE(r.reply);
    CHECK_FALSE(r.announce);
    const Ack late = *w.runtime.handle_hello(*u.hello, SimTime{0}).reply;
    CHECK(u.runtime.handle_ack(late, from_ms(2500)) == Outcome::BootstrapErased);
  }

  SUBCASE("cluster keys from strangers or tampered blobs are rejected") {
    ClusterKeyMsg m = msgs[0];
    m.sender = 11;
    CHECK(v.runtime.handle_cluster_key(m) == Outcome::UnknownSender);
    m = msgs[0];
    m.blob[3] ^= 0x10;
    CHECK(v.runtime.handle_cluster_key(m) == Outcome::AuthFailure);
  }
}

TEST_CASE("sequence requests") {
  const Fixture f;
  auto u = f.boot(7);
  HashChain chain = f.chain;
  const auto r1 = chain.reveal();
  const SeqRequest req{r1.index, r1.element};

  CHECK(u.runtime.handle_seq_request(req).outcome == Outcome::Ignored);  // still discovering
  (void)u.runtime.on_tmin_expire(from_ms(2000));

  const auto handled = u.runtime.handle_seq_request(req);
  REQUIRE(handled.outcome == Outcome::Accepted);
  const SeqResponse& resp = *handled.reply;
  CHECK(resp.sender == 7);
  CHECK(resp.round == 1);
  const Block16 plain =
      unwrap_block(derive_individual_key(f.global, 7), resp.blob, seq_response_context(7, 1));
  CHECK(plain == pad_sequence(f.bundle(7).sequence_number));

  CHECK(u.runtime.handle_seq_request(req).outcome == Outcome::StaleRound);
  CHECK(u.runtime.handle_seq_request(SeqRequest{2, Block16{}}).outcome == Outcome::ChainFailure);
  const auto r2 = chain.reveal();
  CHECK(u.runtime.handle_seq_request(SeqRequest{r2.index, r2.element}).outcome == Outcome::Accepted);
}

TEST_CASE("revocation") {
  const Fixture f;
  auto u = f.boot(7);
  auto v = f.boot(9);
  REQUIRE(handshake(u.runtime, *u.hello, v.runtime) == Outcome::Accepted);
  (void)u.runtime.on_tmin_expire(from_ms(2000));

  SUBCASE("of a neighbour drops its keys and rekeys the cluster") {
    const SymKey old_cluster = *u.runtime.store().own_cluster_key();
    auto out = u.runtime.handle_revoke(f.revoke(9, 1));
    CHECK(out.outcome == Outcome::Accepted);
    CHECK(u.runtime.revoked_set().contains(9));
    CHECK_FALSE(u.runtime.store().pairwise_keys().contains(9));
    CHECK(*u.runtime.store().own_cluster_key() != old_cluster);
    CHECK(out.redistribution.empty());  // no neighbours left
    CHECK(u.runtime.handle_revoke(f.revoke(9, 2)).outcome == Outcome::Duplicate);
    CHECK(u.runtime.handle_hello(*v.hello, from_ms(2100)).outcome == Outcome::RevokedSender);
  }

  SUBCASE("of itself silences the node") {
    CHECK(u.runtime.handle_revoke(f.revoke(7, 1)).outcome == Outcome::Accepted);
    CHECK(u.runtime.phase() == NodePhase::Revoked);
    CHECK(u.runtime.handle_seq_request(SeqRequest{2, f.chain.element(2)}).outcome == Outcome::Silent);
  }

  SUBCASE("forged or unchained REVOKEs are rejected") {
    Revoke bad = f.revoke(9, 1);
    bad.tag.bytes[7] ^= 1;
    CHECK(u.runtime.handle_revoke(bad).outcome == Outcome::AuthFailure);
    Revoke unchained{9, 1, Block16{}, MacTag{}};
    unchained.tag = mac(f.global, revoke_body(unchained));
    CHECK(u.runtime.handle_revoke(unchained).outcome == Outcome::ChainFailure);
    CHECK(u.runtime.revoked_set().empty());
  }
}

TEST_CASE("phases only move forward") {
  const Fixture f;
  for (NodeId id = 1; id <= 20; ++id) {
    auto b = f.boot(id);
    NodeRuntime& rt = b.runtime;
    (void)rt.on_tmin_expire(from_ms(2000));
    if (id % 2 == 0) (void)rt.handle_revoke(f.revoke(id, 1));
    (void)rt.on_tmin_expire(from_ms(3000));
    const auto& h = rt.phase_history();
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(static_cast<int>(h[i - 1]) < static_cast<int>(h[i]));
  }
}

TEST_CASE("resume from a captured store") {
  const Fixture f;
  auto u = f.boot(7);
  const NodeKeyStore pre = u.runtime.store();
  auto clone = NodeRuntime::resume(pre, from_ms(500), from_ms(2000), 77);
  CHECK(clone.runtime.phase() == NodePhase::Discovery);
  CHECK(clone.hello.has_value());
  CHECK(clone.timer_at == from_ms(2000));

  (void)u.runtime.on_tmin_expire(from_ms(2000));
  auto late = NodeRuntime::resume(u.runtime.store(), from_ms(5000), from_ms(2000), 78);
  CHECK(late.runtime.phase() == NodePhase::Operational);
  CHECK_FALSE(late.hello.has_value());
}
