#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsadapt/control.hpp"
#include "qsadapt/decision.hpp"
#include "qsadapt/monitor.hpp"
#include "qsadapt/queue_sim.hpp"
#include "qsadapt/telemetry.hpp"

namespace qsa::config {

/// Synthetic Poisson runs at growing horizons (queue-metrics trend table).
struct TrendConfig {
  double lambda = 0.0;
  std::vector<double> horizons;
  std::optional<double> r_at;
  std::uint64_t seed = 1;
  queue::SeverityMix mix;
};

/// Everything one `run` needs. Paths are absolute once loaded.
struct ScenarioConfig {
  std::string session_id = "s1";

  std::uint64_t seed = 1;
  double duration = 300.0;
  double step = 1.0;
  std::vector<telemetry::AnomalyScenario> scenarios;

  monitor::ThresholdRuleSet thresholds;

  queue::QueueConfig queue{0.0, {10.0, 50.0, 100.0}, 50, queue::OverflowPolicy::RejectArrival};
  double severe_threshold_ms = 15.0;
  std::optional<TrendConfig> trend;

  decision::SelectionOptions selection;
  double ema_alpha = 0.5;
  std::map<Category, std::string> overrides;

  std::optional<int> active_users;
  control::RecommendationCaps caps;

  bool adaptation_enabled = true;

  std::optional<std::filesystem::path> catalog_path;
  std::filesystem::path kb_path = "kb.csv";
  std::filesystem::path report_dir = "report";
};

/// Parses a JSON scenario document. Relative paths resolve against
/// `base_dir`. Unknown keys are rejected. Throws Error(InvalidArgument).
ScenarioConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);

/// Throws Error(NotFound) when the file is missing.
ScenarioConfig load(const std::filesystem::path& path);

/// Checks module preconditions across the whole config.
void validate(const ScenarioConfig& config);

}  // namespace qsa::config
