#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leapforge/trace.hpp"

namespace leapforge {

/// One row of metrics.csv (long form: metric,key,value).
struct MetricRow {
  std::string metric;
  std::string key;
  std::string value;
  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct MetricsReport {
  std::vector<MetricRow> rows;

  std::optional<std::string> find(const std::string& metric, const std::string& key) const;
  std::string to_csv() const;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Derives every metric from the trace alone, so a parsed trace.jsonl gives
/// the same report as the in-memory one. Events of adversary entities are
/// not counted.
///
/// Rows, in this order:
///   individual_key_ready_ms,<node>   boot time
///   pairwise_keys,<node>             pairwise keys held at erasure
///   pairwise_complete_ms,<node>      last pairwise key stored before erasure
///   cluster_key_ready_ms,<node>      own cluster key generated and one
///                                    received from every pairwise neighbour
///   peak_store_bytes,<node>
///   messages,<TYPE> / bytes,<TYPE>   honest transmissions, then ",total"
///   audit_rounds,all
///   detection_latency_ms,<node>      audit start to the last node accepting
///                                    the REVOKE
MetricsReport compute_metrics(const RunTrace& trace);

std::string metrics_csv_header();

}  // namespace leapforge
