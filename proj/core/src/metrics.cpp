#include "leapforge/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "leapforge/config.hpp"
#include "leapforge/wire.hpp"

namespace leapforge {

namespace {

bool from_adversary(const TraceEvent& e) { return e.detail.contains("entity"); }

std::string ms(SimTime t) { return format_double(to_ms(t)); }

struct NodeFacts {
  std::optional<SimTime> boot;
  std::optional<SimTime> erase;
  std::map<std::int64_t, SimTime> pairwise;  // neighbour -> first stored
  std::optional<SimTime> own_cluster;
  std::map<std::int64_t, SimTime> cluster_from;
  std::size_t peak_store = 0;
};

}  // namespace

std::string metrics_csv_header() { return "metric,key,value"; }

std::optional<std::string> MetricsReport::find(const std::string& metric, const std::string& key) const {
  for (const auto& r : rows) {
    if (r.metric == metric && r.key == key) return r.value;
  }
  return std::nullopt;
}

std::string MetricsReport::to_csv() const {
  std::ostringstream os;
  os << metrics_csv_header() << '\n';
  for (const auto& r : rows) os << r.metric << ',' << r.key << ',' << r.value << '\n';
  return os.str();
}

MetricsReport compute_metrics(const RunTrace& trace) {
  std::map<std::int64_t, NodeFacts> nodes;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> traffic;  // type -> count, bytes
  std::size_t audit_rounds = 0;
  // revoked node -> (audit start, issue time)
  std::map<std::int64_t, std::pair<SimTime, SimTime>> issued;
  std::map<std::int64_t, SimTime> last_accept;

  for (const auto& e : trace.events) {
    if (from_adversary(e)) continue;
    if (e.kind == "place" && e.src) {
      NodeFacts& f = nodes[*e.src];
      f.peak_store = std::max(f.peak_store, e.detail.value("store_bytes", std::size_t{0}));
    } else if (e.kind == "boot" && e.src) {
      nodes[*e.src].boot = e.t;
    } else if (e.kind == "erase" && e.src) {
      nodes[*e.src].erase = e.t;
    } else if (e.kind == "pairwise" && e.src && e.dst) {
      nodes[*e.src].pairwise.try_emplace(*e.dst, e.t);
    } else if (e.kind == "cluster_key_generated" && e.src) {
      NodeFacts& f = nodes[*e.src];
      if (!f.own_cluster) f.own_cluster = e.t;
    } else if (e.kind == "cluster_key" && e.src && e.dst) {
      nodes[*e.src].cluster_from.try_emplace(*e.dst, e.t);
    } else if (e.kind == "store" && e.src) {
      NodeFacts& f = nodes[*e.src];
      f.peak_store = std::max(f.peak_store, e.detail.value("bytes", std::size_t{0}));
    } else if (e.kind == "tx") {
      auto& [count, bytes] = traffic[e.detail.value("type", std::string{"?"})];
      ++count;
      bytes += e.detail.value("bytes", std::uint64_t{0});
    } else if (e.kind == "audit_begin") {
      ++audit_rounds;
    } else if (e.kind == "revoke_issued" && e.dst) {
      const SimTime began = from_ms(e.detail.value("audit_began_ms", 0.0));
      issued.try_emplace(*e.dst, began, e.t);
    } else if (e.kind == "revoked" && e.dst) {
      last_accept[*e.dst] = std::max(last_accept[*e.dst], e.t);
    }
  }

  MetricsReport report;
  auto add = [&report](std::string metric, std::string key, std::string value) {
    report.rows.push_back(MetricRow{std::move(metric), std::move(key), std::move(value)});
  };

  for (const auto& [id, f] : nodes) {
    if (f.boot) add("individual_key_ready_ms", std::to_string(id), ms(*f.boot));
  }
  for (const auto& [id, f] : nodes) {
    std::size_t held = 0;
    std::optional<SimTime> last;
    for (const auto& [peer, t] : f.pairwise) {
      if (f.erase && t > *f.erase) continue;
      ++held;
      last = std::max(last.value_or(t), t);
    }
    add("pairwise_keys", std::to_string(id), std::to_string(held));
    if (last) add("pairwise_complete_ms", std::to_string(id), ms(*last));
  }
  for (const auto& [id, f] : nodes) {
    if (!f.own_cluster) continue;
    SimTime ready = *f.own_cluster;
    bool complete = true;
    for (const auto& [peer, t] : f.pairwise) {
      const auto it = f.cluster_from.find(peer);
      if (it == f.cluster_from.end()) {
        complete = false;
        break;
      }
      ready = std::max(ready, it->second);
    }
    if (complete) add("cluster_key_ready_ms", std::to_string(id), ms(ready));
  }
  for (const auto& [id, f] : nodes) add("peak_store_bytes", std::to_string(id), std::to_string(f.peak_store));

  std::uint64_t total_count = 0;
  std::uint64_t total_bytes = 0;
  for (std::uint8_t t = 1; t <= 6; ++t) {
    const std::string name(to_string(static_cast<MsgType>(t)));
    const auto it = traffic.find(name);
    const auto [count, bytes] = it == traffic.end() ? std::pair<std::uint64_t, std::uint64_t>{} : it->second;
    add("messages", name, std::to_string(count));
    add("bytes", name, std::to_string(bytes));
    total_count += count;
    total_bytes += bytes;
  }
  add("messages", "total", std::to_string(total_count));
  add("bytes", "total", std::to_string(total_bytes));
  add("audit_rounds", "all", std::to_string(audit_rounds));

  for (const auto& [id, times] : issued) {
    const auto [began, issued_at] = times;
    const auto it = last_accept.find(id);
    const SimTime done = it == last_accept.end() ? issued_at : std::max(issued_at, it->second);
    add("detection_latency_ms", std::to_string(id), ms(done - began));
  }
  return report;
}

}  // namespace leapforge
