#include <benchmark/benchmark.h>

#include "leapforge/crypto.hpp"
#include "leapforge/keying.hpp"

namespace {

using namespace leapforge;

void BM_Cmac16(benchmark::State& state) {
  const Block16 key{1, 2, 3};
  const Block16 msg{};
  for (auto _ : state) benchmark::DoNotOptimize(aes_cmac(key, msg));
}
BENCHMARK(BM_Cmac16);

void BM_DerivePairwise(benchmark::State& state) {
  const SymKey master(Block16{7}, KeyRole::Master);
  NodeId peer = 1;
  for (auto _ : state) benchmark::DoNotOptimize(derive_pairwise_key(master, peer++));
}
BENCHMARK(BM_DerivePairwise);

void BM_WrapUnwrap(benchmark::State& state) {
  const SymKey kek(Block16{9}, KeyRole::Master);
  const Block16 payload{4, 5, 6};
  const std::array<std::uint8_t, 4> ctx{0, 1, 0, 2};
  for (auto _ : state) {
    const WrappedBlock blob = wrap_block(kek, payload, ctx);
    benchmark::DoNotOptimize(unwrap_block(kek, blob, ctx));
  }
}
BENCHMARK(BM_WrapUnwrap);

void BM_ChainVerify(benchmark::State& state) {
  const auto index = static_cast<std::uint32_t>(state.range(0));
  const HashChain chain = HashChain::build(Block16{3}, index);
  for (auto _ : state) benchmark::DoNotOptimize(chain_verify(chain.element(index), chain.commitment(), index));
}
BENCHMARK(BM_ChainVerify)->Arg(1)->Arg(64)->Arg(1024);

}  // namespace
