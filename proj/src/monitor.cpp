#include "qsadapt/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "qsadapt/errors.hpp"

namespace qsa::monitor {

void validate(const ThresholdRuleSet& r) {
  require(r.qos_min_packets_out > 0, "qos_min_packets_out must be positive");
  require(r.qoa_max_cpu > 0, "qoa_max_cpu must be positive");
  require(r.intrusion_max_logins > 0, "intrusion_max_logins must be positive");
  require(r.dos_packet_surge_factor > 0, "dos_packet_surge_factor must be positive");
  require(r.dos_reference_packets > 0, "dos_reference_packets must be positive");
  require(r.dos_window > 0, "dos_window must be positive");
  require(r.max_tamper_flags >= 0, "max_tamper_flags must be non-negative");
  require(r.baseline_latency_ms > 0, "baseline_latency_ms must be positive");
  require(r.latency_inflation_floor_ms >= 0, "latency_inflation_floor_ms must be non-negative");
  for (auto c : kAllCategories) {
    auto it = r.default_severity_ms.find(c);
    require(it != r.default_severity_ms.end() && it->second >= 0,
            "default severity missing for " + std::string(to_string(c)));
  }
}

double estimate_severity(const telemetry::MetricSample& sample, double baseline_latency) {
  require(baseline_latency > 0, "baseline latency must be positive");
  return std::max(0.0, sample.latency - baseline_latency);
}

std::vector<AnomalyEvent> evaluate(const telemetry::MetricSample& s,
                                   const ThresholdRuleSet& rules, double packet_median) {
  std::vector<AnomalyEvent> out;
  const double excess = estimate_severity(s, rules.baseline_latency_ms);
  auto emit = [&](Category c, std::string metric, double value) {
    AnomalyEvent e;
    e.arrival_time = s.timestamp;
    e.category = c;
    e.trigger = {std::move(metric), value};
    e.severity = excess > rules.latency_inflation_floor_ms ? excess
                                                           : rules.default_severity_ms.at(c);
    e.session_id = s.session_id;
    out.push_back(std::move(e));
  };

  const auto packets = static_cast<double>(s.packets_out);
  if (s.cpu_utilization > rules.qoa_max_cpu) emit(Category::QoA, "cpu_utilization", s.cpu_utilization);
  if (packets < rules.qos_min_packets_out) emit(Category::QoS, "packets_out", packets);
  if (packets > rules.dos_packet_surge_factor * packet_median) {
    emit(Category::SecurityDoS, "packets_out", packets);
  } else if (static_cast<double>(s.tamper_flags) > rules.max_tamper_flags) {
    emit(Category::SecurityDoS, "tamper_flags", static_cast<double>(s.tamper_flags));
  }
  if (static_cast<double>(s.login_attempts) > rules.intrusion_max_logins) {
    emit(Category::Intrusion, "login_attempts", static_cast<double>(s.login_attempts));
  }
  return out;
}

Monitor::Monitor(ThresholdRuleSet rules) : rules_(std::move(rules)) { validate(rules_); }

double Monitor::packet_median() const {
  if (window_.empty()) return rules_.dos_reference_packets;
  std::vector<double> v(window_.begin(), window_.end());
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::vector<AnomalyEvent> Monitor::evaluate(const telemetry::MetricSample& sample) {
  auto events = monitor::evaluate(sample, rules_, packet_median());
  for (auto& e : events) e.id = next_id_++;
  // Only alarm-free samples feed the baseline median.
  if (events.empty()) {
    window_.push_back(static_cast<double>(sample.packets_out));
    if (window_.size() > rules_.dos_window) window_.pop_front();
  }
  return events;
}

}  // namespace qsa::monitor
