#include <benchmark/benchmark.h>

#include "elastic/scenario.hpp"

using namespace elastic;

namespace {

void run_days(benchmark::State& state, const char* file, std::int64_t days) {
  ScenarioConfig cfg = parse_scenario_file(std::string(ELASTIC_SCENARIO_DIR) + "/" + file);
  cfg.days = days;
  for (auto _ : state) {
    Simulation sim(cfg);
    while (!sim.done()) benchmark::DoNotOptimize(sim.step_day());
  }
  state.SetItemsProcessed(state.iterations() * days);
}

void BM_CentralDays(benchmark::State& state) { run_days(state, "baseline.json", 90); }
void BM_LedgerDays(benchmark::State& state) { run_days(state, "ledger.json", 90); }

BENCHMARK(BM_CentralDays)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LedgerDays)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
