#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qsadapt/queue_analytics.hpp"
#include "qsadapt/rng.hpp"
#include "qsadapt/severity_heap.hpp"

namespace qsa::queue {

enum class OverflowPolicy { RejectArrival, EvictLowestSeverity };

std::string_view to_string(OverflowPolicy p);
std::optional<OverflowPolicy> parse_overflow_policy(std::string_view s);

struct QueueConfig {
  double lambda = 1.0;  // Poisson arrival rate; 0 means no generated arrivals
  StageRates rates;
  std::size_t capacity_k = 50;  // max events in system, including the one in service
  OverflowPolicy overflow_policy = OverflowPolicy::RejectArrival;
};

void validate(const QueueConfig& config);

/// Severity mix of generated arrivals: uniform on [min_ms, max_ms], category
/// drawn uniformly from the four anomaly categories.
struct SeverityMix {
  double min_ms = 0.0;
  double max_ms = 30.0;
};

struct SimOptions {
  double horizon = 1000.0;
  std::uint64_t seed = 1;
  double severe_threshold_ms = 15.0;
  double warmup = 0.0;  // statistics ignore [0, warmup)
  std::optional<double> r_at;
  SeverityMix mix;
};

struct SimStats {
  // Mean time in queue per admitted event; evicted events count up to their
  // eviction, events still waiting at the horizon are not counted.
  double mean_wq = 0.0;
  // Lq / λ with λ the offered arrival rate: the queue-length view of the
  // wait, which also covers events still waiting at the horizon.
  double wq_from_queue_length = 0.0;
  double mean_lq = 0.0;  // time average of waiting events
  double mean_l = 0.0;   // time average of events in system
  double mean_x_bar_empirical = 0.0;
  double mean_rtq = 0.0;
  double mean_rs = 0.0;  // only meaningful when an Rat was supplied
  double effective_lambda = 0.0;
  double blocking_prob = 0.0;
  std::uint64_t arrivals = 0;
  std::uint64_t processed_total = 0;
  std::uint64_t processed_severe = 0;
  std::uint64_t rejected = 0;  // refused or evicted
  std::uint64_t in_system_at_horizon = 0;

  bool operator==(const SimStats&) const = default;
};

struct Departure {
  AnomalyEvent event;
  double service_start = 0.0;
  double departure = 0.0;

  double wait() const { return service_start - event.arrival_time; }
  double service() const { return departure - service_start; }
};

enum class Admission { Admitted, Rejected, AdmittedWithEviction };

/// Single non-preemptive server in front of a severity-ordered binary heap,
/// capacity K counted over waiting plus in-service events. Service time is
/// the sum of three exponential stages.
///
/// The caller drives time forward: feed arrivals with `arrive` and complete
/// services with `depart` in non-decreasing time order.
class PriorityServer {
 public:
  using StartHook = std::function<void(const AnomalyEvent& started, const SeverityHeap& waiting)>;

  PriorityServer(QueueConfig config, std::uint64_t service_seed);

  /// `evicted` receives the displaced event under EvictLowestSeverity.
  Admission arrive(AnomalyEvent event, AnomalyEvent* evicted = nullptr);

  std::optional<double> next_departure() const;

  /// Completes the service in progress and starts the next one.
  /// Throws Error(EmptyQueue) when the server is idle.
  Departure depart();

  /// Moves the clock without an event (for time-average bookkeeping).
  void advance(double t);

  /// Restarts the time integrals at the current clock.
  void reset_areas();

  double now() const { return now_; }
  bool busy() const { return in_service_.has_value(); }
  std::size_t queue_length() const { return waiting_.size(); }
  std::size_t in_system() const { return waiting_.size() + (busy() ? 1 : 0); }
  const SeverityHeap& waiting() const { return waiting_; }
  double queue_area() const { return queue_area_; }
  double system_area() const { return system_area_; }
  const QueueConfig& config() const { return config_; }

  void on_service_start(StartHook hook) { start_hook_ = std::move(hook); }

 private:
  void start_next();
  double draw_service();

  struct InService {
    AnomalyEvent event;
    double start = 0.0;
    double end = 0.0;
  };

  QueueConfig config_;
  Rng rng_;
  SeverityHeap waiting_;
  std::optional<InService> in_service_;
  double now_ = 0.0;
  double area_origin_ = 0.0;
  double queue_area_ = 0.0;
  double system_area_ = 0.0;
  StartHook start_hook_;
};

/// Poisson-driven run. `departures`, when non-null, receives every
/// completed service in departure order.
SimStats simulate(const QueueConfig& config, const SimOptions& options,
                  std::vector<Departure>* departures = nullptr);

/// Trace-driven run over events sorted by arrival time.
SimStats simulate(const QueueConfig& config, const std::vector<AnomalyEvent>& events,
                  const SimOptions& options, std::vector<Departure>* departures = nullptr);

}  // namespace qsa::queue
