#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "elastic/market.hpp"

using namespace elastic;

namespace {

std::vector<Order> random_orders(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> px(990'000'000, 1'000'000'000);
  std::uniform_int_distribution<std::int64_t> qty(1, 100);
  std::bernoulli_distribution coin(0.5);
  std::vector<Order> out;
  out.push_back(Order{OrderId{1}, kAuthority, Side::kBuy, Date{7}, 0,
                      Price::from_nanos(999'601'511), true, 1, Date{0}});
  out.push_back(Order{OrderId{2}, kAuthority, Side::kSell, Date{7}, 0,
                      Price::from_nanos(999'639'099), true, 2, Date{0}});
  for (std::int64_t i = 0; i < n; ++i) {
    const auto seq = static_cast<std::uint64_t>(i + 3);
    out.push_back(Order{OrderId{seq}, AccountId{static_cast<std::uint32_t>(i % 50 + 1)},
                        coin(rng) ? Side::kBuy : Side::kSell, Date{7}, qty(rng),
                        Price::from_nanos(px(rng)), false, seq, Date{0}});
  }
  return out;
}

void BM_ClearCallAuction(benchmark::State& state) {
  const std::vector<Order> orders = random_orders(state.range(0), 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clear_call_auction(orders, Date{7}, Date{0}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClearCallAuction)->RangeMultiplier(4)->Range(16, 16384);

}  // namespace
