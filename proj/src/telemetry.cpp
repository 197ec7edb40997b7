#include "qsadapt/telemetry.hpp"

#include <algorithm>
#include <cmath>

#include "qsadapt/errors.hpp"
#include "qsadapt/rng.hpp"

namespace qsa::telemetry {

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::PacketDrop: return "PacketDrop";
    case ScenarioKind::PacketDropPlusLag: return "PacketDropPlusLag";
    case ScenarioKind::DoSFlood: return "DoSFlood";
    case ScenarioKind::DuplicationPlusTampering: return "DuplicationPlusTampering";
    case ScenarioKind::UnauthorizedAccess: return "UnauthorizedAccess";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
  for (auto k : {ScenarioKind::PacketDrop, ScenarioKind::PacketDropPlusLag,
                 ScenarioKind::DoSFlood, ScenarioKind::DuplicationPlusTampering,
                 ScenarioKind::UnauthorizedAccess}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

Stream generate_baseline(std::uint64_t seed, double duration, double step,
                         const std::string& session_id, const BaselineBands& bands) {
  require(std::isfinite(duration) && duration > 0, "baseline duration must be positive");
  require(std::isfinite(step) && step > 0, "baseline step must be positive");

  const auto count = static_cast<std::size_t>(std::ceil(duration / step - 1e-9));
  Rng rng(seed);
  const double lat_lo = bands.latency_center * (1.0 - bands.latency_rel_jitter);
  const double lat_hi = bands.latency_center * (1.0 + bands.latency_rel_jitter);

  Stream out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    MetricSample s;
    s.timestamp = static_cast<double>(i) * step;
    s.packets_out = rng.uniform_int(bands.packets_min, bands.packets_max);
    s.cpu_utilization = rng.uniform(bands.cpu_min, bands.cpu_max);
    s.latency = rng.uniform(lat_lo, lat_hi);
    s.login_attempts = rng.uniform_int(0, bands.logins_max);
    s.session_id = session_id;
    out.push_back(std::move(s));
  }
  return out;
}

void validate(const AnomalyScenario& sc) {
  require(std::isfinite(sc.start), "scenario start must be finite");
  require(std::isfinite(sc.duration) && sc.duration > 0, "scenario duration must be positive");
  require(std::isfinite(sc.lag_ms) && sc.lag_ms >= 0, "scenario lag_ms must be non-negative");
  if (sc.cpu_load) {
    require(*sc.cpu_load >= 0 && *sc.cpu_load <= 100, "scenario cpu_load must lie in [0, 100]");
  }
  const double x = sc.intensity;
  require(std::isfinite(x), "scenario intensity must be finite");
  switch (sc.kind) {
    case ScenarioKind::PacketDrop:
      require(x >= 0 && x <= 1, "PacketDrop intensity is a drop fraction in [0, 1]");
      break;
    case ScenarioKind::PacketDropPlusLag:
      require(x >= 0 && x <= 1, "PacketDropPlusLag intensity is a drop fraction in [0, 1]");
      require(sc.lag_ms > 0, "PacketDropPlusLag needs a positive lag_ms");
      break;
    case ScenarioKind::DoSFlood:
      require(x >= 1 && x <= 1000, "DoSFlood intensity is a rate multiplier in [1, 1000]");
      break;
    case ScenarioKind::DuplicationPlusTampering:
      require(x > 0 && x <= 1, "DuplicationPlusTampering intensity is a fraction in (0, 1]");
      break;
    case ScenarioKind::UnauthorizedAccess:
      require(x >= 0 && x <= 1e6 && x == std::floor(x),
              "UnauthorizedAccess intensity is a whole attempt count");
      break;
    default:
      fail(ErrorCode::InvalidArgument, "unknown scenario kind");
  }
}

bool in_window(const AnomalyScenario& sc, double t) {
  return t >= sc.start && t < sc.start + sc.duration;
}

namespace {

double cpu_load_for(const AnomalyScenario& sc) {
  if (sc.cpu_load) return *sc.cpu_load;
  switch (sc.kind) {
    case ScenarioKind::PacketDropPlusLag:
    case ScenarioKind::DoSFlood:
      return kDefaultAttackCpu;
    default:
      return 0.0;
  }
}

std::int64_t scale(std::int64_t packets, double factor) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(packets) * factor));
}

void apply(const AnomalyScenario& sc, MetricSample& s) {
  switch (sc.kind) {
    case ScenarioKind::PacketDrop:
    case ScenarioKind::PacketDropPlusLag:
      s.packets_out = scale(s.packets_out, 1.0 - sc.intensity);
      break;
    case ScenarioKind::DoSFlood:
      s.packets_out = scale(s.packets_out, sc.intensity);
      break;
    case ScenarioKind::DuplicationPlusTampering:
      s.packets_out = scale(s.packets_out, 1.0 + sc.intensity);
      s.tamper_flags += std::max<std::int64_t>(1, std::llround(sc.intensity * 100.0));
      break;
    case ScenarioKind::UnauthorizedAccess:
      s.login_attempts = static_cast<std::int64_t>(sc.intensity);
      break;
  }
  s.latency += sc.lag_ms;
  const double cpu = cpu_load_for(sc);
  if (cpu > 0) s.cpu_utilization = std::clamp(std::max(s.cpu_utilization, cpu), 0.0, 100.0);
}

}  // namespace

Stream inject(const Stream& stream, const AnomalyScenario& scenario) {
  validate(scenario);
  Stream out = stream;
  for (auto& s : out) {
    if (in_window(scenario, s.timestamp)) apply(scenario, s);
  }
  return out;
}

}  // namespace qsa::telemetry
