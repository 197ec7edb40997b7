#include "qsadapt/queue_analytics.hpp"

#include <cmath>

#include "qsadapt/errors.hpp"

namespace qsa::queue {

void validate(const StageRates& r) {
  for (double mu : {r.mu1, r.mu2, r.mu3}) {
    require(std::isfinite(mu) && mu > 0, "stage rates must be positive and finite");
  }
}

double mean_service_time(const StageRates& r) {
  validate(r);
  return 1.0 / r.mu1 + 1.0 / r.mu2 + 1.0 / r.mu3;
}

double wq_from_lq(double lq, double lambda) {
  require(lambda > 0, "arrival rate must be positive");
  require(lq >= 0, "queue length must be non-negative");
  return lq / lambda;
}

double response_time_in_queue(double wq, double x_bar) {
  require(wq >= 0 && x_bar >= 0, "wait and service times must be non-negative");
  return wq + x_bar;
}

double system_response(double rtq, double r_at) {
  require(rtq >= 0 && r_at >= 0, "response times must be non-negative");
  return rtq + r_at;
}

Mm1kMetrics mm1k_analytics(double lambda, double mu, std::size_t capacity_k) {
  require(std::isfinite(lambda) && lambda > 0, "arrival rate must be positive");
  require(std::isfinite(mu) && mu > 0, "service rate must be positive");
  require(capacity_k >= 1, "capacity K must be at least 1");

  Mm1kMetrics m;
  m.rho = lambda / mu;
  const std::size_t K = capacity_k;
  m.state_probs.assign(K + 1, 0.0);

  if (m.rho == 1.0) {
    for (auto& p : m.state_probs) p = 1.0 / static_cast<double>(K + 1);
  } else {
    // Pn ∝ ρ^n. Weights are taken relative to the largest term (ρ^0 or ρ^K)
    // so large K never overflows; normalising gives the usual closed form.
    const bool heavy = m.rho > 1.0;
    double total = 0.0;
    for (std::size_t n = 0; n <= K; ++n) {
      const double e = heavy ? static_cast<double>(n) - static_cast<double>(K)
                             : static_cast<double>(n);
      m.state_probs[n] = std::pow(m.rho, e);
      total += m.state_probs[n];
    }
    for (auto& p : m.state_probs) p /= total;
  }

  for (std::size_t n = 0; n <= K; ++n) m.L += static_cast<double>(n) * m.state_probs[n];
  m.blocking_prob = m.state_probs[K];
  m.utilization = 1.0 - m.state_probs[0];
  m.Lq = std::max(0.0, m.L - m.utilization);
  m.effective_lambda = lambda * (1.0 - m.blocking_prob);
  m.W = m.L / m.effective_lambda;
  m.Wq = m.Lq / m.effective_lambda;
  return m;
}

}  // namespace qsa::queue
