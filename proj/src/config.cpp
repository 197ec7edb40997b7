#include "qsadapt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsadapt/errors.hpp"

namespace qsa::config {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::string_view where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, std::string(where) + " must be an object");
  std::set<std::string_view> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      fail(ErrorCode::InvalidArgument, "unknown key '" + k + "' in " + std::string(where));
    }
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

telemetry::AnomalyScenario parse_scenario(const json& j) {
  only_keys(j, "scenario", {"kind", "start", "duration", "intensity", "lag_ms", "cpu_load"});
  telemetry::AnomalyScenario sc;
  const auto kind = j.at("kind").get<std::string>();
  auto k = telemetry::parse_scenario_kind(kind);
  if (!k) fail(ErrorCode::InvalidArgument, "unknown scenario kind '" + kind + "'");
  sc.kind = *k;
  sc.start = j.at("start").get<double>();
  sc.duration = j.at("duration").get<double>();
  get_if(j, "intensity", sc.intensity);
  if (sc.kind == telemetry::ScenarioKind::PacketDropPlusLag) sc.lag_ms = telemetry::kDefaultLagMs;
  get_if(j, "lag_ms", sc.lag_ms);
  if (j.contains("cpu_load") && !j.at("cpu_load").is_null()) sc.cpu_load = j.at("cpu_load").get<double>();
  telemetry::validate(sc);
  return sc;
}

void parse_monitor(const json& j, monitor::ThresholdRuleSet& r) {
  only_keys(j, "monitor",
            {"qos_min_packets_out", "qoa_max_cpu", "intrusion_max_logins", "dos_packet_surge_factor",
             "dos_reference_packets", "dos_window", "max_tamper_flags", "baseline_latency_ms",
             "latency_inflation_floor_ms", "default_severity_ms"});
  get_if(j, "qos_min_packets_out", r.qos_min_packets_out);
  get_if(j, "qoa_max_cpu", r.qoa_max_cpu);
  get_if(j, "intrusion_max_logins", r.intrusion_max_logins);
  get_if(j, "dos_packet_surge_factor", r.dos_packet_surge_factor);
  get_if(j, "dos_reference_packets", r.dos_reference_packets);
  get_if(j, "dos_window", r.dos_window);
  get_if(j, "max_tamper_flags", r.max_tamper_flags);
  get_if(j, "baseline_latency_ms", r.baseline_latency_ms);
  get_if(j, "latency_inflation_floor_ms", r.latency_inflation_floor_ms);
  if (j.contains("default_severity_ms")) {
    for (const auto& [k, v] : j.at("default_severity_ms").items()) {
      r.default_severity_ms[category_from_string(k)] = v.get<double>();
    }
  }
}

void parse_queue(const json& j, ScenarioConfig& c) {
  only_keys(j, "queue", {"mu", "capacity", "overflow_policy", "severe_threshold_ms", "trend"});
  if (j.contains("mu")) {
    const auto mu = j.at("mu").get<std::vector<double>>();
    if (mu.size() != 3) fail(ErrorCode::InvalidArgument, "queue.mu needs exactly three stage rates");
    c.queue.rates = {mu[0], mu[1], mu[2]};
  }
  get_if(j, "capacity", c.queue.capacity_k);
  if (j.contains("overflow_policy")) {
    const auto p = j.at("overflow_policy").get<std::string>();
    auto policy = queue::parse_overflow_policy(p);
    if (!policy) fail(ErrorCode::InvalidArgument, "unknown overflow_policy '" + p + "'");
    c.queue.overflow_policy = *policy;
  }
  get_if(j, "severe_threshold_ms", c.severe_threshold_ms);
  if (j.contains("trend") && !j.at("trend").is_null()) {
    const auto& t = j.at("trend");
    only_keys(t, "queue.trend",
              {"lambda", "horizons", "r_at_s", "seed", "severity_min_ms", "severity_max_ms"});
    TrendConfig tc;
    tc.lambda = t.at("lambda").get<double>();
    tc.horizons = t.at("horizons").get<std::vector<double>>();
    if (t.contains("r_at_s") && !t.at("r_at_s").is_null()) tc.r_at = t.at("r_at_s").get<double>();
    get_if(t, "seed", tc.seed);
    get_if(t, "severity_min_ms", tc.mix.min_ms);
    get_if(t, "severity_max_ms", tc.mix.max_ms);
    c.trend = std::move(tc);
  }
}

void parse_decision(const json& j, ScenarioConfig& c) {
  only_keys(j, "decision", {"ct_descending", "ema_alpha", "overrides"});
  get_if(j, "ct_descending", c.selection.ct_descending);
  get_if(j, "ema_alpha", c.ema_alpha);
  if (j.contains("overrides")) {
    for (const auto& [k, v] : j.at("overrides").items()) {
      c.overrides[category_from_string(k)] = v.get<std::string>();
    }
  }
}

Level level_field(const json& j, const char* key) {
  const auto s = j.at(key).get<std::string>();
  auto l = parse_level(s);
  if (!l) fail(ErrorCode::InvalidArgument, std::string("bad level for ") + key + ": '" + s + "'");
  return *l;
}

void parse_control(const json& j, ScenarioConfig& c) {
  only_keys(j, "control", {"active_users", "risk_cap", "cost_cap", "unavailable"});
  if (j.contains("active_users")) c.active_users = j.at("active_users").get<int>();
  if (j.contains("risk_cap")) c.caps.risk = level_field(j, "risk_cap");
  if (j.contains("cost_cap")) c.caps.cost = level_field(j, "cost_cap");
  if (j.contains("unavailable")) {
    for (const auto& n : j.at("unavailable")) c.caps.unavailable.insert(n.get<std::string>());
  }
}

}  // namespace

ScenarioConfig parse(std::string_view text, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    only_keys(doc, "config",
              {"session_id", "telemetry", "monitor", "queue", "decision", "control",
               "adaptation_enabled", "catalog", "kb_path", "report_dir"});
    get_if(doc, "session_id", c.session_id);
    if (doc.contains("telemetry")) {
      const auto& t = doc.at("telemetry");
      only_keys(t, "telemetry", {"seed", "duration", "step", "scenarios"});
      get_if(t, "seed", c.seed);
      get_if(t, "duration", c.duration);
      get_if(t, "step", c.step);
      if (t.contains("scenarios")) {
        for (const auto& s : t.at("scenarios")) c.scenarios.push_back(parse_scenario(s));
      }
    }
    if (doc.contains("monitor")) parse_monitor(doc.at("monitor"), c.thresholds);
    if (doc.contains("queue")) parse_queue(doc.at("queue"), c);
    if (doc.contains("decision")) parse_decision(doc.at("decision"), c);
    if (doc.contains("control")) parse_control(doc.at("control"), c);
    get_if(doc, "adaptation_enabled", c.adaptation_enabled);
    if (doc.contains("catalog") && !doc.at("catalog").is_null()) {
      c.catalog_path = resolve(base_dir, doc.at("catalog").get<std::string>());
    }
    if (doc.contains("kb_path")) c.kb_path = doc.at("kb_path").get<std::string>();
    if (doc.contains("report_dir")) c.report_dir = doc.at("report_dir").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed config: ") + e.what());
  }
  c.kb_path = resolve(base_dir, c.kb_path.string());
  c.report_dir = resolve(base_dir, c.report_dir.string());
  validate(c);
  return c;
}

ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse(ss.str(), base);
}

void validate(const ScenarioConfig& c) {
  require(!c.session_id.empty() && c.session_id.find_first_of(",\"\r\n") == std::string::npos,
          "session_id must be non-empty plain text");
  require(c.duration > 0, "telemetry.duration must be positive");
  require(c.step > 0, "telemetry.step must be positive");
  for (const auto& s : c.scenarios) telemetry::validate(s);
  monitor::validate(c.thresholds);
  queue::validate(c.queue);
  require(c.severe_threshold_ms >= 0, "queue.severe_threshold_ms must be >= 0");
  require(c.ema_alpha > 0 && c.ema_alpha <= 1, "decision.ema_alpha must lie in (0, 1]");
  if (c.active_users) require(*c.active_users >= 0, "control.active_users must be >= 0");
  if (c.trend) {
    require(c.trend->lambda > 0, "queue.trend.lambda must be positive");
    require(!c.trend->horizons.empty(), "queue.trend.horizons must not be empty");
    for (double h : c.trend->horizons) require(h > 0, "queue.trend.horizons must be positive");
    require(c.trend->mix.min_ms >= 0 && c.trend->mix.max_ms >= c.trend->mix.min_ms,
            "queue.trend severity range is invalid");
  }
  if (c.catalog_path) {
    require(std::filesystem::exists(*c.catalog_path),
            "catalog file does not exist: " + c.catalog_path->string());
  }
}

}  // namespace qsa::config
