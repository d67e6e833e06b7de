#include "doctest.h"
#include "leapforge/radio.hpp"

using namespace leapforge;

namespace {

RadioModel line_of_three() {
  RadioModel r = RadioModel::from_params(RadioParams{30.0, 5.0, 5.0, 0.0});
  r.positions = {{1, {0, 0}}, {2, {20, 0}}, {3, {45, 0}}};
  return r;
}

}  // namespace

TEST_CASE("unit disk reachability") {
  RadioModel r = line_of_three();
  CHECK(r.in_range(1, 2));
  CHECK(r.in_range(2, 3));
  CHECK_FALSE(r.in_range(1, 3));
  CHECK_FALSE(r.in_range(1, 1));

  r.tx_multiplier[1] = 2.0;  // reaches 60 m, but only outbound
  CHECK(r.in_range(1, 3));
  CHECK_FALSE(r.in_range(3, 1));
  CHECK(r.effective_range(1) == doctest::Approx(60.0));
}

TEST_CASE("deliveries are ordered, latency bounded, seeded") {
  const RadioModel r = line_of_three();
  Rng a(1);
  Rng b(1);
  const BroadcastPlan p = deliver_broadcast(r, 2, from_ms(100), a);
  const BroadcastPlan q = deliver_broadcast(r, 2, from_ms(100), b);
  REQUIRE(p.deliveries.size() == 2);
  CHECK(p.deliveries[0].receiver == 1);
  CHECK(p.deliveries[1].receiver == 3);
  for (const auto& d : p.deliveries) {
    CHECK(d.arrival >= from_ms(105));
    CHECK(d.arrival <= from_ms(110));
  }
  CHECK(p.deliveries[0].arrival == q.deliveries[0].arrival);
  CHECK(p.deliveries[1].arrival == q.deliveries[1].arrival);
}

TEST_CASE("loss probability extremes") {
  RadioModel r = line_of_three();
  Rng rng(3);
  r.loss_prob = 1.0;
  const BroadcastPlan all_lost = deliver_broadcast(r, 2, SimTime{0}, rng);
  CHECK(all_lost.deliveries.empty());
  CHECK(all_lost.lost.size() == 2);

  r.loss_prob = 0.3;
  std::size_t lost = 0;
  for (int i = 0; i < 2000; ++i) lost += deliver_broadcast(r, 2, SimTime{0}, rng).lost.size();
  CHECK(static_cast<double>(lost) / 4000.0 == doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("range boundary and amplified transmitters") {
  RadioModel r = RadioModel::from_params(RadioParams{});
  r.positions = {{1, {0, 0}}, {2, {30, 0}}, {3, {31, 0}}, {4, {300, 0}}, {5, {301, 0}}};
  CHECK(r.in_range(1, 2));
  CHECK_FALSE(r.in_range(1, 3));
  r.tx_multiplier[1] = 10.0;
  CHECK(r.in_range(1, 4));
  CHECK_FALSE(r.in_range(1, 5));
}
