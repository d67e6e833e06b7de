#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "leapforge/random.hpp"
#include "leapforge/scenario.hpp"
#include "leapforge/sim_time.hpp"

namespace leapforge {

/// Radio endpoint handle. Honest nodes use their node id, the base station 0,
/// adversary devices ids from kAdversaryEndpointBase upward.
using EndpointId = std::uint32_t;
inline constexpr EndpointId kAdversaryEndpointBase = 0x10000;

/// Unit-disk propagation with seeded per-receiver loss and latency jitter.
/// Positions are fixed for the whole run.
struct RadioModel {
  double range_m = 30.0;
  SimTime base_latency{5000};
  SimTime max_jitter{5000};
  double loss_prob = 0.0;
  std::map<EndpointId, Position> positions;
  std::map<EndpointId, double> tx_multiplier;  // absent means 1

  static RadioModel from_params(const RadioParams& params);

  double effective_range(EndpointId sender) const;
  bool in_range(EndpointId sender, EndpointId receiver) const;
};

struct ScheduledDelivery {
  EndpointId receiver;
  SimTime arrival;
};

struct BroadcastPlan {
  std::vector<ScheduledDelivery> deliveries;
  std::vector<EndpointId> lost;
};

/// Receivers in range of `sender` (excluding itself), in ascending endpoint
/// order. Each draws loss, then jitter, from `rng`.
BroadcastPlan deliver_broadcast(const RadioModel& radio, EndpointId sender, SimTime now, Rng& rng);

/// Latency draw for a single hop.
SimTime hop_latency(const RadioModel& radio, Rng& rng);

}  // namespace leapforge
