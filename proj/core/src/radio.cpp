#include "leapforge/radio.hpp"

#include <stdexcept>

namespace leapforge {

RadioModel RadioModel::from_params(const RadioParams& params) {
  RadioModel radio;
  radio.range_m = params.range_m;
  radio.base_latency = from_ms(params.latency_ms);
  radio.max_jitter = from_ms(params.jitter_ms);
  radio.loss_prob = params.loss_prob;
  return radio;
}

double RadioModel::effective_range(EndpointId sender) const {
  const auto it = tx_multiplier.find(sender);
  return range_m * (it == tx_multiplier.end() ? 1.0 : it->second);
}

bool RadioModel::in_range(EndpointId sender, EndpointId receiver) const {
  if (sender == receiver) return false;
  return distance(positions.at(sender), positions.at(receiver)) <= effective_range(sender);
}

SimTime hop_latency(const RadioModel& radio, Rng& rng) {
  std::uniform_int_distribution<std::int64_t> jitter(0, radio.max_jitter.count());
  return radio.base_latency + SimTime{jitter(rng)};
}

BroadcastPlan deliver_broadcast(const RadioModel& radio, EndpointId sender, SimTime now, Rng& rng) {
  if (!radio.positions.contains(sender)) throw std::out_of_range("sender has no position");
  std::bernoulli_distribution lose(radio.loss_prob);
  BroadcastPlan plan;
  for (const auto& [receiver, pos] : radio.positions) {
    if (receiver == sender || !radio.in_range(sender, receiver)) continue;
    if (lose(rng)) {
      plan.lost.push_back(receiver);
      continue;
    }
    plan.deliveries.push_back({receiver, now + hop_latency(radio, rng)});
  }
  return plan;
}

}  // namespace leapforge
