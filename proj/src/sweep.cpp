#include "qsadapt/sweep.hpp"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsa::queue {

SweepResult run_cell(const SweepCell& cell) {
  SweepResult r;
  r.simulated = simulate(cell.config, cell.options);
  const double mu_eff = 1.0 / mean_service_time(cell.config.rates);
  r.analytic = mm1k_analytics(cell.config.lambda, mu_eff, cell.config.capacity_k);
  return r;
}

std::vector<SweepResult> run_sweep_serial(std::span<const SweepCell> cells) {
  std::vector<SweepResult> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(run_cell(c));
  return out;
}

std::vector<SweepResult> run_sweep_parallel(std::span<const SweepCell> cells) {
  std::vector<SweepResult> out(cells.size());
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
  // Cell cost varies a lot with ρ and horizon; hand them out one at a time.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run_cell(cells[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

SweepCell with_seed(SweepCell cell, std::size_t r) {
  cell.options.seed += r;
  return cell;
}

}  // namespace

std::vector<SimStats> replicate_serial(const SweepCell& cell, std::size_t replications) {
  std::vector<SimStats> out;
  out.reserve(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    const auto c = with_seed(cell, r);
    out.push_back(simulate(c.config, c.options));
  }
  return out;
}

std::vector<SimStats> replicate_parallel(const SweepCell& cell, std::size_t replications) {
  std::vector<SimStats> out(replications);
  const auto n = static_cast<std::ptrdiff_t>(replications);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto c = with_seed(cell, static_cast<std::size_t>(r));
    out[static_cast<std::size_t>(r)] = simulate(c.config, c.options);
  }
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qsa::queue
