#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "flexduplex/engine.hpp"
#include "flexduplex/provisioning.hpp"
#include "flexduplex/radio.hpp"

namespace fd = flexduplex;

static void BM_ScheduleRr(benchmark::State& state) {
  std::vector<int> ues(static_cast<std::size_t>(state.range(0)));
  std::iota(ues.begin(), ues.end(), 0);
  std::vector<int> needs(ues.size());
  for (std::size_t i = 0; i < needs.size(); ++i) needs[i] = 1 + static_cast<int>(i % 7);
  int cursor = 0;
  for (auto _ : state) {
    auto g = fd::engine::schedule_rr(ues, 50, cursor, needs);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_ScheduleRr)->Arg(4)->Arg(16)->Arg(50);

static void BM_SpectralEfficiency(benchmark::State& state) {
  double s = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd::radio::spectral_efficiency(s));
    s = s > 30.0 ? -10.0 : s + 0.37;
  }
}
BENCHMARK(BM_SpectralEfficiency);

static void BM_MinmaxAllocation(benchmark::State& state) {
  std::vector<fd::provisioning::CellDemand> demands;
  for (int i = 0; i < state.range(0); ++i) {
    demands.push_back(fd::provisioning::CellDemand::from_traffic("c" + std::to_string(i), fd::Direction::kDownlink,
                                                                 0.5 + 0.1 * i, 2e6, 8.64e5));
  }
  for (auto _ : state) {
    auto a = fd::provisioning::minmax_allocation(demands, 100);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_MinmaxAllocation)->Arg(2)->Arg(8)->Arg(32);

// One full subframe of the default deployment, all services active.
static void BM_SimulationStep(benchmark::State& state) {
  fd::engine::SimConfig cfg;
  cfg.scheme = static_cast<fd::engine::Scheme>(state.range(0));
  cfg.lambda_dl = 1.0;
  cfg.seed = 7;
  fd::engine::Simulation sim(cfg, 0);
  long long t = 0;
  for (auto _ : state) sim.step(t++);
  state.SetItemsProcessed(t);
}
BENCHMARK(BM_SimulationStep)->DenseRange(0, 3);

static void BM_Construct(benchmark::State& state) {
  fd::engine::SimConfig cfg;
  cfg.scheme = fd::engine::Scheme::kFmaDlReuse;
  int rep = 0;
  for (auto _ : state) {
    fd::engine::Simulation sim(cfg, rep++);
    benchmark::DoNotOptimize(sim.ues().size());
  }
}
BENCHMARK(BM_Construct);
BENCHMARK_MAIN();
