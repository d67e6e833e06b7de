#include "doctest.h"
#include "leapforge/metrics.hpp"
#include "leapforge/simulator.hpp"
#include "scenarios.hpp"

using namespace leapforge;
using namespace leapforge::testing;

TEST_CASE("metrics recompute identically from the written trace") {
  Scenario s = small_network(10, 21);
  s.adversaries.push_back(CloneConfig{});
  const RunTrace trace = run(s);
  const MetricsReport direct = compute_metrics(trace);
  const MetricsReport reparsed = compute_metrics(parse_jsonl(to_jsonl(trace)));
  CHECK(direct == reparsed);
  CHECK(direct.to_csv().rfind("metric,key,value\n", 0) == 0);
}

TEST_CASE("per-node metrics match the simulator state") {
  Simulator sim(small_network(8, 22));
  sim.run();
  const MetricsReport m = compute_metrics(sim.trace());
  for (const auto& [id, rt] : sim.nodes()) {
    const std::string key = std::to_string(id);
    CHECK(m.find("pairwise_keys", key) == std::to_string(rt.store().pairwise_keys().size()));
    CHECK(std::stod(*m.find("individual_key_ready_ms", key)) == doctest::Approx(to_ms(*sim.boot_time(id))));
    REQUIRE(m.find("cluster_key_ready_ms", key));
    CHECK(std::stod(*m.find("cluster_key_ready_ms", key)) >= to_ms(*sim.erase_time(id)));
    CHECK(std::stoul(*m.find("peak_store_bytes", key)) >= rt.store().dump().size());
  }
  CHECK(m.find("audit_rounds", "all") == std::to_string(sim.registry().audits_started()));
  CHECK(!m.find("detection_latency_ms", "1"));
}

TEST_CASE("message totals add up and ignore adversary traffic") {
  Scenario s = small_network(6, 23);
  const MetricsReport clean = compute_metrics(run(s));
  s.adversaries.push_back(HelloFloodConfig{});
  const RunTrace flooded = run(s);
  const MetricsReport m = compute_metrics(flooded);

  std::uint64_t sum = 0;
  for (const char* t : {"HELLO", "ACK", "CLUSTER_KEY", "SEQ_REQ", "SEQ_RESP", "REVOKE"}) {
    sum += std::stoull(*m.find("messages", t));
  }
  CHECK(std::to_string(sum) == *m.find("messages", "total"));

  std::uint64_t honest_tx = 0;
  for (const auto& e : flooded.events) {
    if (e.kind == "tx" && !e.detail.contains("entity")) ++honest_tx;
  }
  CHECK(std::to_string(honest_tx) == *m.find("messages", "total"));
  (void)clean;
}

TEST_CASE("detection latency spans audit start to the last REVOKE acceptance") {
  Scenario s = small_network(10, 24);
  s.adversaries.push_back(CloneConfig{5, 500.0, 0.0, std::nullopt, CloneSequence::Guess});
  const RunTrace t = run(s);
  const MetricsReport m = compute_metrics(t);
  REQUIRE(m.find("detection_latency_ms", "5"));
  double began = -1;
  double last = -1;
  for (const auto& e : t.events) {
    if (e.kind == "revoke_issued" && e.dst == 5) began = e.detail["audit_began_ms"].get<double>();
    if (e.kind == "revoked" && e.dst == 5 && !e.detail.contains("entity")) last = to_ms(e.t);
  }
  REQUIRE(began >= 0);
  CHECK(std::stod(*m.find("detection_latency_ms", "5")) == doctest::Approx(last - began));
}
