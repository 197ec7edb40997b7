#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "qsadapt/telemetry.hpp"
#include "qsadapt/types.hpp"

namespace qsa::monitor {

struct TriggerMetric {
  std::string name;
  double value = 0.0;
};

/// A classified anomaly. `severity` is latency excess over the baseline in ms.
struct AnomalyEvent {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  Category category = Category::QoA;
  TriggerMetric trigger;
  double severity = 0.0;
  std::string session_id;
};

struct ThresholdRuleSet {
  double qos_min_packets_out = 7280;   // QoS fires below this
  double qoa_max_cpu = 8;              // QoA fires above this
  double intrusion_max_logins = 5;     // Intrusion fires above this
  double dos_packet_surge_factor = 2.0;
  // Packet-rate reference used until the rolling window has data.
  double dos_reference_packets = 7640;
  std::size_t dos_window = 60;
  double max_tamper_flags = 0;
  double baseline_latency_ms = kBaselineLatencyMs;
  // Latency excess at or below this is benign jitter; the category default
  // severity is used instead.
  double latency_inflation_floor_ms = 2.35;
  std::map<Category, double> default_severity_ms = {
      {Category::QoA, 10.0},
      {Category::QoS, 12.0},
      {Category::SecurityDoS, 15.0},
      {Category::Intrusion, 8.0},
  };
};

/// Throws Error(InvalidArgument) unless every threshold is strictly positive.
void validate(const ThresholdRuleSet& rules);

/// max(0, latency - baseline). Throws when baseline_latency <= 0.
double estimate_severity(const telemetry::MetricSample& sample,
                         double baseline_latency = kBaselineLatencyMs);

/// Stateless rule evaluation against a fixed packet-rate median. Events carry
/// id 0; `Monitor` numbers them.
std::vector<AnomalyEvent> evaluate(const telemetry::MetricSample& sample,
                                   const ThresholdRuleSet& rules, double packet_median);

/// Threshold-alarm engine. Holds the rolling packet-rate median for the DoS
/// rule and issues session-unique event ids. Not for concurrent use.
class Monitor {
 public:
  explicit Monitor(ThresholdRuleSet rules = {});

  std::vector<AnomalyEvent> evaluate(const telemetry::MetricSample& sample);

  /// Median of the benign packet rates in the rolling window.
  double packet_median() const;
  const ThresholdRuleSet& rules() const { return rules_; }

 private:
  ThresholdRuleSet rules_;
  std::deque<double> window_;
  std::uint64_t next_id_ = 1;
};

}  // namespace qsa::monitor
