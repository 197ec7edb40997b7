#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsa::telemetry {

/// One snapshot of session telemetry.
struct MetricSample {
  double timestamp = 0.0;           // seconds since session start
  std::int64_t packets_out = 0;     // packets/second
  double cpu_utilization = 0.0;     // percent
  double latency = 0.0;             // ms
  std::int64_t login_attempts = 0;  // per sampling window
  std::int64_t tamper_flags = 0;    // tampered packets seen in the window
  std::string session_id;

  bool operator==(const MetricSample&) const = default;
};

using Stream = std::vector<MetricSample>;

enum class ScenarioKind {
  PacketDrop,
  PacketDropPlusLag,
  DoSFlood,
  DuplicationPlusTampering,
  UnauthorizedAccess,
};

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);

/// An anomaly injected over [start, start + duration).
///
/// `intensity` depends on the kind:
///   PacketDrop, PacketDropPlusLag: fraction of packets dropped, in [0, 1]
///   DoSFlood: packet-rate multiplier, in [1, 1000]
///   DuplicationPlusTampering: duplicated fraction, in (0, 1]
///   UnauthorizedAccess: login attempts per window, integral, in [0, 1e6]
///
/// `lag_ms` adds latency to every in-window sample (any kind; PacketDropPlusLag
/// requires it to be positive). `cpu_load` raises cpu to at least that percent;
/// when unset it defaults to 12% for PacketDropPlusLag and DoSFlood and 0
/// (untouched) otherwise.
struct AnomalyScenario {
  ScenarioKind kind = ScenarioKind::PacketDrop;
  double start = 0.0;
  double duration = 1.0;
  double intensity = 0.0;
  double lag_ms = 0.0;
  std::optional<double> cpu_load;
};

inline constexpr double kDefaultLagMs = 16.5;
inline constexpr double kDefaultAttackCpu = 12.0;

/// Benign bands. Every generated sample stays inside the alarm thresholds.
struct BaselineBands {
  std::int64_t packets_min = 7280;
  std::int64_t packets_max = 8000;
  double cpu_min = 2.0;
  double cpu_max = 8.0;
  double latency_center = 23.5;
  double latency_rel_jitter = 0.10;
  std::int64_t logins_max = 1;
};

/// Throws Error(InvalidArgument) when duration or step is not positive.
Stream generate_baseline(std::uint64_t seed, double duration, double step = 1.0,
                         const std::string& session_id = "s1",
                         const BaselineBands& bands = {});

/// Throws Error(InvalidArgument) when the scenario fails validation.
void validate(const AnomalyScenario& scenario);

/// Returns a copy of `stream` with the scenario applied to in-window samples.
/// Samples outside the window are copied unchanged.
Stream inject(const Stream& stream, const AnomalyScenario& scenario);

bool in_window(const AnomalyScenario& scenario, double t);

}  // namespace qsa::telemetry
