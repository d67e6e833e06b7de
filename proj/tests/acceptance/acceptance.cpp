// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "leapforge/config.hpp"
#include "leapforge/runner.hpp"
#include "leapforge/simulator.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace leapforge;
using namespace leapforge::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Runtime budgets, seconds.
constexpr double kBudgetPairwise = 10.0;
constexpr double kBudgetCrypto = 5.0;

constexpr int kFloodRuns = 20;
constexpr int kCloneRuns = 20;
constexpr int kControlRuns = 50;
constexpr int kCodecFuzz = 100000;
constexpr int kCodecRoundTrips = 10000;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Every in-range pair holds identical keys before T_min, over 40 runs.
Verdict pairwise_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario base = example_scenario("sweep.toml");
  base.radio.loss_prob = 0.0;
  std::vector<SweepRow> rows = sweep(base, {2, 5, 10}, 10);
  const auto big = sweep(base, {20}, 10);
  rows.insert(rows.end(), big.begin(), big.end());

  std::size_t perfect = 0;
  std::string first_bad;
  for (const auto& r : rows) {
    if (r.status == "ok" && r.pairwise_success_fraction == 1.0) {
      ++perfect;
    } else if (first_bad.empty()) {
      first_bad = " first failure n=" + std::to_string(r.node_count) + " repeat " + std::to_string(r.repeat) +
                  ": " + r.status + " fraction " + format_double(r.pairwise_success_fraction);
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << perfect << "/" << rows.size() << " runs with 100% agreement in " << format_double(secs) << " s"
    << first_bad;
  return {perfect == rows.size() && rows.size() == 40 && secs < kBudgetPairwise, d.str()};
}

// 2. RFC 4493 vectors and the wrap tamper suite.
Verdict crypto_conformance() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  const int code = verify_vectors(log);
  // Cross-check against OpenSSL's own CMAC as well.
  const Block16 key = array_from_hex<16>(kRfcKey);
  const Bytes msg = from_hex(kRfcMessage);
  bool openssl_agrees = true;
  for (std::size_t len : {0u, 16u, 40u, 64u}) {
    const ByteView v(msg.data(), len);
    if (aes_cmac(key, v) != openssl_cmac(key, v)) openssl_agrees = false;
  }
  const double secs = seconds_since(t0);
  const std::string text = log.str();
  const auto passes = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
  std::ostringstream d;
  d << passes << " checks, " << (code == kExitOk ? "all passed" : "failures") << ", OpenSSL cross-check "
    << (openssl_agrees ? "agrees" : "DISAGREES") << ", " << format_double(secs) << " s";
  if (code != kExitOk) d << "\n" << text;
  return {code == kExitOk && openssl_agrees && secs < kBudgetCrypto, d.str()};
}

// 3. Post-erasure dumps hold no bootstrap keys and leak no other pair's key.
Verdict localization() {
  Simulator sim(example_scenario("baseline.toml"));
  sim.run();
  const std::size_t n = sim.scenario().node_count;
  const Block16 k_in = sim.initial_key().bytes();
  std::size_t violations = 0;
  std::size_t derived = 0;
  std::string first;
  for (NodeId c = 1; c <= n; ++c) {
    const auto erased = sim.erase_time(c);
    if (!erased) {
      ++violations;
      first = first.empty() ? "node " + std::to_string(c) + " never erased" : first;
      continue;
    }
    for (SimTime at : {*erased, sim.now()}) {
      const Bytes dump = sim.capture_node(c, at);
      if (contains_window(dump, k_in)) {
        ++violations;
        if (first.empty()) first = "K_in in dump of node " + std::to_string(c);
      }
      for (NodeId w = 1; w <= n; ++w) {
        if (w == c) continue;
        const SymKey master = derive_master_key(sim.initial_key(), w);
        if (contains_window(dump, master.view())) {
          ++violations;
          if (first.empty()) first = "master key of " + std::to_string(w) + " in dump of " + std::to_string(c);
        }
      }
      const LocalizationResult r = localization_oracle(dump, c, k_in, n);
      derived += r.derived;
      if (r.initial_key_reachable || !r.leaked_pairs.empty()) {
        ++violations;
        if (first.empty()) first = "oracle derived a foreign key from node " + std::to_string(c);
      }
    }
  }
  std::ostringstream d;
  d << n << " nodes x 2 capture times, " << derived << " keys derived by the oracle, " << violations
    << " violations";
  if (!first.empty()) d << " (" << first << ")";
  return {violations == 0, d.str()};
}

// 4. A HELLO flood without K_in never gets a key.
Verdict flood_containment() {
  const Scenario base = example_scenario("hello_flood.toml");
  const auto& flood = std::get<HelloFloodConfig>(base.adversaries.at(0));
  std::size_t entries = 0;
  std::size_t forged_rejected = 0;
  for (int i = 0; i < kFloodRuns; ++i) {
    Scenario s = base;
    s.seed = base.seed + static_cast<std::uint64_t>(i);
    Simulator sim(s);
    sim.run();
    for (const auto& [id, rt] : sim.nodes()) {
      entries += rt.store().pairwise_keys().count(flood.attacker_id);
      forged_rejected += rt.counters().mac_failures;
    }
  }
  std::ostringstream d;
  d << kFloodRuns << " runs at tx_multiplier " << format_double(flood.tx_multiplier) << ": " << entries
    << " pairwise entries for the attacker, " << forged_rejected << " forged ACKs rejected";
  return {entries == 0 && forged_rejected > 0 && flood.tx_multiplier == 10.0, d.str()};
}

// 5. Clones are flagged in the first round and revoked network-wide; no
//    false positives without an adversary.
Verdict clone_detection() {
  const Scenario base = example_scenario("clone.toml");
  const NodeId victim = std::get<CloneConfig>(base.adversaries.at(0)).victim_id;
  int detected = 0;
  std::string first;
  for (int i = 0; i < kCloneRuns; ++i) {
    Scenario s = base;
    s.seed = base.seed + static_cast<std::uint64_t>(i);
    Simulator sim(s);
    sim.run();
    std::optional<std::uint32_t> first_round;
    bool flagged_first = false;
    for (const auto& line : sim.registry().log()) {
      if (!first_round) first_round = line.round;
      if (line.node == victim && line.status == AuditStatus::Flagged && line.round == *first_round) {
        flagged_first = true;
      }
    }
    bool everywhere = sim.registry().status(victim) == AuditStatus::Revoked;
    for (const auto& [id, rt] : sim.nodes()) {
      if (id == victim) {
        everywhere = everywhere && rt.phase() == NodePhase::Revoked;
      } else {
        everywhere = everywhere && rt.revoked_set().contains(victim);
      }
    }
    if (flagged_first && everywhere) {
      ++detected;
    } else if (first.empty()) {
      first = "seed " + std::to_string(s.seed) + (flagged_first ? " not revoked everywhere" : " not flagged in round 1");
    }
  }

  int false_flags = 0;
  Scenario control = example_scenario("baseline.toml");
  for (int i = 0; i < kControlRuns; ++i) {
    control.seed = 1000 + static_cast<std::uint64_t>(i);
    Simulator sim(control);
    sim.run();
    for (const auto& line : sim.registry().log()) {
      if (line.status == AuditStatus::Flagged) ++false_flags;
    }
  }
  std::ostringstream d;
  d << detected << "/" << kCloneRuns << " clones flagged in round 1 and revoked everywhere; " << false_flags
    << " flags across " << kControlRuns << " clean runs";
  if (!first.empty()) d << " (" << first << ")";
  return {detected == kCloneRuns && false_flags == 0, d.str()};
}

// 6. Replaying recorded ACK/SEQ_REQ/REVOKE frames changes no store.
Verdict replay_resistance() {
  const Scenario s = example_scenario("replay.toml");
  const auto& cfg = std::get<ReplayConfig>(s.adversaries.at(0));
  Simulator sim(s);
  sim.run_until(from_ms(cfg.replay_ms) - SimTime{1});
  const auto before = stores_at(sim, sim.now());
  sim.run();
  const auto after = stores_at(sim, sim.now());
  std::size_t replayed = 0;
  for (const auto& e : sim.trace().events) {
    if (e.kind == "replay") replayed += e.detail.value("frames", std::size_t{0});
  }
  std::size_t changed = 0;
  for (const auto& [id, dump] : before) {
    if (after.at(id) != dump) ++changed;
  }
  std::ostringstream d;
  d << replayed << " frames replayed into " << s.node_count << " nodes, " << changed << " stores changed";
  return {changed == 0 && replayed > 0 && s.node_count == 10, d.str()};
}

// 7. Byte-identical artifacts across two executions.
Verdict determinism() {
  std::size_t checked = 0;
  std::string first;
  for (const char* name : {"baseline.toml", "hello_flood.toml", "clone.toml", "replay.toml", "grid.toml",
                           "sweep.toml"}) {
    const Scenario s = example_scenario(name);
    Simulator a(s);
    a.run();
    Simulator b(s);
    b.run();
    const RunArtifacts x = collect_artifacts(a);
    const RunArtifacts y = collect_artifacts(b);
    ++checked;
    if (x.trace_jsonl != y.trace_jsonl || x.metrics_csv != y.metrics_csv || x.audit_csv != y.audit_csv) {
      if (first.empty()) first = name;
    }
  }
  Scenario base = example_scenario("sweep.toml");
  std::ostringstream s1, s2;
  for (const auto& r : sweep(base, {5}, 3)) s1 << to_csv_row(r) << '\n';
  for (const auto& r : sweep(base, {5}, 3)) s2 << to_csv_row(r) << '\n';
  if (s1.str() != s2.str() && first.empty()) first = "sweep";
  std::ostringstream d;
  d << checked << " scenarios and one sweep run twice, " << (first.empty() ? "all identical" : "differs: " + first);
  return {first.empty(), d.str()};
}

// 8. Decoder robustness and codec identity.
Verdict codec_robustness() {
  Rng rng(0xc0dec);
  std::uniform_int_distribution<std::size_t> len(0, 48);
  std::size_t malformed = 0;
  std::size_t valid = 0;
  std::size_t other = 0;
  for (int i = 0; i < kCodecFuzz; ++i) {
    Bytes b(len(rng));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    if (i % 3 == 0 && !b.empty()) b[0] = static_cast<std::uint8_t>(1 + rng() % 6);
    try {
      const WireMessage m = decode(b);
      if (encode(m) != b) ++other;
      ++valid;
    } catch (const MalformedMessage&) {
      ++malformed;
    } catch (...) {
      ++other;
    }
  }
  std::size_t identity_failures = 0;
  for (int i = 0; i < kCodecRoundTrips; ++i) {
    const auto id = [&rng] { return static_cast<NodeId>(1 + rng() % 0xfffe); };
    WireMessage m;
    switch (i % 6) {
      case 0: m = Hello{id(), Nonce{random_bytes<8>(rng)}}; break;
      case 1: m = Ack{id(), id(), Nonce{random_bytes<8>(rng)}, MacTag{random_bytes<8>(rng)}}; break;
      case 2: m = ClusterKeyMsg{id(), id(), random_bytes<24>(rng)}; break;
      case 3: m = SeqRequest{static_cast<std::uint32_t>(rng()), random_bytes<16>(rng)}; break;
      case 4: m = SeqResponse{id(), static_cast<std::uint32_t>(rng()), random_bytes<24>(rng)}; break;
      default:
        m = Revoke{id(), static_cast<std::uint32_t>(rng()), random_bytes<16>(rng), MacTag{random_bytes<8>(rng)}};
    }
    try {
      if (decode(encode(m)) != m) ++identity_failures;
    } catch (...) {
      ++identity_failures;
    }
  }
  std::ostringstream d;
  d << kCodecFuzz << " fuzz inputs: " << malformed << " MalformedMessage, " << valid << " valid, " << other
    << " other; " << kCodecRoundTrips << " round trips, " << identity_failures << " failures";
  return {other == 0 && identity_failures == 0 && malformed + valid == kCodecFuzz, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"pairwise agreement across node counts", pairwise_agreement},
      {"crypto oracle conformance", crypto_conformance},
      {"erasure and localization", localization},
      {"HELLO-flood containment", flood_containment},
      {"clone detection and zero false positives", clone_detection},
      {"replay resistance", replay_resistance},
      {"determinism", determinism},
      {"codec robustness", codec_robustness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << (i + 1) << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << ": " << v.detail << std::endl;
    if (!v.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
