// Serial reference vs OpenMP sweep over independent queue cells.

#include <benchmark/benchmark.h>

#include <vector>

#include "qsadapt/sweep.hpp"

namespace {

std::vector<qsa::queue::SweepCell> grid(double horizon) {
  std::vector<qsa::queue::SweepCell> cells;
  std::uint64_t seed = 1;
  for (double rho : {0.3, 0.5, 0.7, 0.8, 0.9, 0.95}) {
    for (std::size_t k : {5u, 20u, 50u}) {
      qsa::queue::SweepCell c;
      c.config.rates = {1.0 / 0.998, 1000.0, 1000.0};
      c.config.lambda = rho;
      c.config.capacity_k = k;
      c.options.horizon = horizon;
      c.options.seed = seed++;
      cells.push_back(c);
    }
  }
  return cells;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto cells = grid(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qsa::queue::run_sweep_serial(cells));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto cells = grid(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qsa::queue::run_sweep_parallel(cells));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells.size()));
  state.counters["threads"] = qsa::queue::max_threads();
}

void BM_ReplicateSerial(benchmark::State& state) {
  const auto cell = grid(static_cast<double>(state.range(0)))[10];
  for (auto _ : state) benchmark::DoNotOptimize(qsa::queue::replicate_serial(cell, 16));
}

void BM_ReplicateParallel(benchmark::State& state) {
  const auto cell = grid(static_cast<double>(state.range(0)))[10];
  for (auto _ : state) benchmark::DoNotOptimize(qsa::queue::replicate_parallel(cell, 16));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicateSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicateParallel)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
