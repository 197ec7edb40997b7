#pragma once

#include <cstddef>
#include <vector>

namespace qsa::queue {

/// Service rates of the three processing stages (events/second):
/// collect, categorize, push to the decision module.
struct StageRates {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double mu3 = 1.0;
};

void validate(const StageRates& rates);

/// X̄ = 1/μ1 + 1/μ2 + 1/μ3.
double mean_service_time(const StageRates& rates);

/// Wq = Lq / λ. Throws Error(InvalidArgument) unless λ > 0 and Lq >= 0.
double wq_from_lq(double lq, double lambda);

/// RTq = Wq + X̄.
double response_time_in_queue(double wq, double x_bar);

/// Rs = RTq + Rat.
double system_response(double rtq, double r_at);

struct Mm1kMetrics {
  std::vector<double> state_probs;  // P0..PK
  double rho = 0.0;
  double blocking_prob = 0.0;  // PK
  double L = 0.0;
  double Lq = 0.0;
  double effective_lambda = 0.0;
  double W = 0.0;
  double Wq = 0.0;
  double utilization = 0.0;  // 1 - P0
};

/// Closed-form M/M/1/K steady state. Throws Error(InvalidArgument) on
/// non-positive rates or capacity_k < 1.
Mm1kMetrics mm1k_analytics(double lambda, double mu, std::size_t capacity_k);

}  // namespace qsa::queue
