#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsadapt/catalog.hpp"
#include "qsadapt/knowledge_base.hpp"
#include "qsadapt/telemetry.hpp"
#include "qsadapt/types.hpp"

namespace qsa::control {

// ---------------------------------------------------------------------------
// Risk and cost

struct RiskAssessment {
  double likelihood = 0.0;    // L(D)
  double impact = 0.0;        // I
  double failure_risk = 0.0;  // Rf = 1 - (L(D) + I) / 2
  Level bucket = Level::Low;
};

/// Throws Error(InvalidArgument) unless both inputs lie in [0, 1].
RiskAssessment assess_risk(double likelihood, double impact);

/// Low below 1/3, Medium below 2/3, High otherwise.
Level risk_bucket(double failure_risk);

inline constexpr double kCostLowCeiling = 0.25;    // $/hr
inline constexpr double kCostMediumCeiling = 2.5;  // $/hr

/// Throws Error(InvalidArgument) on negative cost.
Level cost_bucket(double cost_per_hour);

// ---------------------------------------------------------------------------
// Enactment

struct SystemState {
  double latency = kBaselineLatencyMs;  // ms
  double cpu = 0.0;                     // percent
  double packets_out = 0.0;             // packets/s
  double login_attempts = 0.0;
  double accrued_cost = 0.0;  // dollars
  std::set<std::string> active_adaptations;
};

struct EnactmentRecord {
  std::string adaptation;
  Category anomaly = Category::QoA;
  double requested_at = 0.0;  // s
  double effective_at = 0.0;  // requested_at + Rat
  double r_at = 0.0;
  double pre_latency = 0.0;
  double post_latency = 0.0;
  std::optional<double> delta_cs;
  double cost_added = 0.0;
};

/// Latency after scaling the excess over the baseline by (1 - delta).
double reduce_excess(double latency, double delta, double baseline = kBaselineLatencyMs);

/// Applies an adaptation chosen for `anomaly`: the latency excess shrinks by
/// the catalog ΔCS for that anomaly (when known), the threshold effect is
/// imposed, and `billed_seconds` of cost is accrued. Takes effect Rat seconds
/// after `clock`.
///
/// Throws Error(UnknownEffect) when the entry has neither a ΔCS for this
/// anomaly nor a threshold effect.
std::pair<SystemState, EnactmentRecord> enact(const AdaptationCatalogEntry& entry,
                                              Category anomaly, const SystemState& state,
                                              double clock, double billed_seconds,
                                              const Catalog& catalog);

/// An adaptation in force, as seen by incoming telemetry.
struct ActiveAdaptation {
  std::string name;
  Category anomaly = Category::QoA;
  std::optional<double> delta_cs;
  ThresholdEffect effect;
  double since = 0.0;
  double cost_per_hour = 0.0;
};

/// What a sample looks like once the active adaptations are in force.
telemetry::MetricSample observe(const telemetry::MetricSample& raw,
                                std::span<const ActiveAdaptation> active,
                                double baseline = kBaselineLatencyMs);

// ---------------------------------------------------------------------------
// Feedback

/// clamp((pre_excess - post_excess) / pre_excess, 0, 1).
/// Throws Error(NothingToMeasure) if pre_latency is at or below the baseline.
double measure_impact(double pre_latency, double post_latency,
                      double baseline = kBaselineLatencyMs);

struct FeedbackContext {
  std::string session_id;
  double timestamp = 0.0;
  Category anomaly = Category::QoA;
};

/// Measures the impact and appends a FeedbackMeasured record. The stored
/// history folds successive measurements with an exponential moving average.
double feedback(double pre_latency, double post_latency, const AdaptationCatalogEntry& entry,
                kb::KnowledgeBase& kb, const FeedbackContext& ctx);

// ---------------------------------------------------------------------------
// ECA recommendations

struct RecommendationCaps {
  Level risk = Level::Low;
  Level cost = Level::Low;
  /// Adaptations whose preconditions fail in the current session.
  std::set<std::string> unavailable;
};

struct Recommendation {
  const EcaRule* rule = nullptr;
  EcaBranch branch;
  bool took_else = false;
};

/// THEN when its risk and cost levels are within the caps and its adaptation
/// is available, otherwise ELSE. Throws Error(NoRecommendation) if no rule
/// matches or the THEN branch fails without an ELSE.
Recommendation recommend(const Catalog& catalog, Category anomaly, std::string_view scenario_key,
                         const RecommendationCaps& caps);

}  // namespace qsa::control
