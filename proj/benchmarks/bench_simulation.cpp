#include <benchmark/benchmark.h>

#include "leapforge/simulator.hpp"

namespace {

void BM_Run(benchmark::State& state) {
  leapforge::Scenario s;
  s.node_count = static_cast<std::size_t>(state.range(0));
  s.area_m = 80.0;
  s.horizon_ms = 30000.0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    s.seed = seed++;
    benchmark::DoNotOptimize(leapforge::run(s).events.size());
  }
}
BENCHMARK(BM_Run)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
