#pragma once

#include <span>
#include <vector>

#include "qsadapt/queue_analytics.hpp"
#include "qsadapt/queue_sim.hpp"

namespace qsa::queue {

/// One point of a parameter sweep: a queue, how long to run it, and the
/// seed. Cells are independent, so a sweep is embarrassingly parallel.
struct SweepCell {
  QueueConfig config;
  SimOptions options;
};

struct SweepResult {
  SimStats simulated;
  Mm1kMetrics analytic;  // M/M/1/K with μ_eff = 1/X̄
};

SweepResult run_cell(const SweepCell& cell);

/// Reference implementation: cells in order on the calling thread.
std::vector<SweepResult> run_sweep_serial(std::span<const SweepCell> cells);

/// OpenMP over cells. Each cell owns its RNG streams, so the output is
/// identical to run_sweep_serial for any thread count.
std::vector<SweepResult> run_sweep_parallel(std::span<const SweepCell> cells);

/// Independent replications of one cell with seeds seed, seed+1, ...
std::vector<SimStats> replicate_serial(const SweepCell& cell, std::size_t replications);
std::vector<SimStats> replicate_parallel(const SweepCell& cell, std::size_t replications);

int max_threads();

}  // namespace qsa::queue
