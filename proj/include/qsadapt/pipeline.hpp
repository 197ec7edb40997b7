#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsadapt/catalog.hpp"
#include "qsadapt/config.hpp"
#include "qsadapt/control.hpp"
#include "qsadapt/decision.hpp"
#include "qsadapt/knowledge_base.hpp"
#include "qsadapt/monitor.hpp"
#include "qsadapt/queue_sim.hpp"
#include "qsadapt/telemetry.hpp"

namespace qsa::pipeline {

enum class EventOutcome { Adapted, AlreadyCovered, NotAdapted, Rejected, EnactmentFailed };

std::string_view to_string(EventOutcome o);

struct EventTrace {
  monitor::AnomalyEvent event;
  std::optional<queue::Departure> departure;  // unset when refused or evicted
  EventOutcome outcome = EventOutcome::NotAdapted;
  std::string adaptation;
};

/// One enacted (or attempted) adaptation.
struct LedgerRow {
  std::uint64_t event_id = 0;
  Category anomaly = Category::QoA;
  std::string adaptation;
  std::string description;
  std::string specific_category;
  bool overridden = false;
  double decided_at = 0.0;
  double effective_at = 0.0;
  double r_at = 0.0;
  double cost_per_hour = 0.0;
  Level cost_level = Level::Low;
  std::string threshold_effect;
  std::optional<double> catalog_delta_cs;
  control::RiskAssessment risk;
  std::int64_t ct = 0;
  double pre_latency = 0.0;
  double post_latency = 0.0;
  std::optional<double> measured_impact;
  // 1 - excess with this adaptation / excess without it, summed over the
  // anomalous samples from effective_at to the end of the stream.
  std::optional<double> stream_reduction;
  double cost_accrued = 0.0;
  std::vector<decision::AdaptationTuple> candidates;  // decision order
  bool failed = false;
  std::string note;
};

struct TrendRow {
  double horizon = 0.0;
  queue::SimStats stats;
};

struct RecommendationRow {
  control::EcaRule rule;
  control::RiskAssessment then_risk;
  std::optional<control::RiskAssessment> else_risk;
  std::optional<control::EcaBranch> chosen;  // unset when no branch fits the caps
  bool took_else = false;
};

struct RunResult {
  std::string session_id;
  bool adaptation_enabled = true;
  double duration = 0.0;
  telemetry::Stream raw;
  telemetry::Stream observed;
  std::vector<EventTrace> events;
  std::vector<LedgerRow> ledger;
  queue::SimStats queue_stats;
  double mean_rat = 0.0;  // over adapted events
  std::vector<TrendRow> trend;
  std::vector<RecommendationRow> recommendations;
  std::map<Category, std::size_t> detected;
  double accrued_cost = 0.0;
  // Latency excess summed over anomalous samples, unmitigated vs observed.
  double raw_excess_total = 0.0;
  double observed_excess_total = 0.0;
};

/// Baseline stream with every configured scenario injected.
telemetry::Stream build_stream(const config::ScenarioConfig& config);

/// Decision unit for `anomaly`, extended with `name` when it is not a
/// regular candidate (forced overrides).
decision::DecisionUnit unit_including(Category anomaly, const std::string& name,
                                      const kb::KnowledgeBase& kb,
                                      const control::Catalog& catalog, double ema_alpha);

/// Failure risk of choosing `name` for `anomaly` given the knowledge base.
control::RiskAssessment branch_risk(Category anomaly, const std::string& name,
                                    const kb::KnowledgeBase& kb, const control::Catalog& catalog,
                                    const decision::SelectionOptions& options = {},
                                    double ema_alpha = 0.5);

/// First session id not yet present in the store: `base`, then base-r2, ...
std::string free_session_id(const kb::KnowledgeBase& kb, const std::string& base);

/// Monitor, queue, decide and enact over the configured stream, appending
/// every step to `kb`. Deterministic for a given config, catalog and store.
RunResult run(const config::ScenarioConfig& config, const control::Catalog& catalog,
              kb::KnowledgeBase& kb);

}  // namespace qsa::pipeline
