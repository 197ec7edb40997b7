#include "qsadapt/control.hpp"

#include <algorithm>
#include <cmath>

#include "qsadapt/errors.hpp"

namespace qsa::control {

RiskAssessment assess_risk(double likelihood, double impact) {
  require(likelihood >= 0 && likelihood <= 1, "likelihood must lie in [0, 1]");
  require(impact >= 0 && impact <= 1, "impact must lie in [0, 1]");
  RiskAssessment r;
  r.likelihood = likelihood;
  r.impact = impact;
  r.failure_risk = 1.0 - (likelihood + impact) / 2.0;
  r.bucket = risk_bucket(r.failure_risk);
  return r;
}

Level risk_bucket(double rf) {
  if (rf < 1.0 / 3.0) return Level::Low;
  if (rf < 2.0 / 3.0) return Level::Medium;
  return Level::High;
}

Level cost_bucket(double cost_per_hour) {
  require(std::isfinite(cost_per_hour) && cost_per_hour >= 0, "cost must be non-negative");
  if (cost_per_hour < kCostLowCeiling) return Level::Low;
  if (cost_per_hour < kCostMediumCeiling) return Level::Medium;
  return Level::High;
}

double reduce_excess(double latency, double delta, double baseline) {
  const double excess = latency - baseline;
  if (excess <= 0) return latency;
  return baseline + excess * (1.0 - delta);
}

namespace {

void apply_effect(const ThresholdEffect& e, double& cpu, double& packets, double& logins) {
  if (e.cpu_set) cpu = std::min(cpu, *e.cpu_set);
  if (e.packets_floor) packets = std::max(packets, *e.packets_floor);
  if (e.packets_cap) packets = std::min(packets, *e.packets_cap);
  if (e.logins_cap) logins = std::min(logins, *e.logins_cap);
}

}  // namespace

std::pair<SystemState, EnactmentRecord> enact(const AdaptationCatalogEntry& entry,
                                              Category anomaly, const SystemState& state,
                                              double clock, double billed_seconds,
                                              const Catalog& catalog) {
  require(billed_seconds >= 0, "billed time must be non-negative");
  const auto delta = entry.delta_for(anomaly);
  if (!delta && entry.threshold_effect.empty()) {
    fail(ErrorCode::UnknownEffect, entry.name + " has no known effect on " +
                                       std::string(to_string(anomaly)) + " anomalies");
  }

  SystemState next = state;
  EnactmentRecord rec;
  rec.adaptation = entry.name;
  rec.anomaly = anomaly;
  rec.requested_at = clock;
  rec.r_at = catalog.resolved_rat(entry);
  rec.effective_at = clock + rec.r_at;
  rec.pre_latency = state.latency;
  rec.delta_cs = delta;

  if (delta) next.latency = reduce_excess(state.latency, *delta);
  apply_effect(entry.threshold_effect, next.cpu, next.packets_out, next.login_attempts);
  rec.post_latency = next.latency;
  rec.cost_added = entry.cost_per_hour * billed_seconds / 3600.0;
  next.accrued_cost += rec.cost_added;
  next.active_adaptations.insert(entry.name);
  return {std::move(next), std::move(rec)};
}

telemetry::MetricSample observe(const telemetry::MetricSample& raw,
                                std::span<const ActiveAdaptation> active, double baseline) {
  telemetry::MetricSample s = raw;
  double cpu = s.cpu_utilization;
  auto packets = static_cast<double>(s.packets_out);
  auto logins = static_cast<double>(s.login_attempts);
  for (const auto& a : active) {
    if (a.delta_cs) s.latency = reduce_excess(s.latency, *a.delta_cs, baseline);
    apply_effect(a.effect, cpu, packets, logins);
    if (a.effect.clear_tamper) s.tamper_flags = 0;
  }
  s.cpu_utilization = cpu;
  s.packets_out = static_cast<std::int64_t>(std::llround(packets));
  s.login_attempts = static_cast<std::int64_t>(std::llround(logins));
  return s;
}

double measure_impact(double pre_latency, double post_latency, double baseline) {
  const double pre_excess = pre_latency - baseline;
  if (!(pre_excess > 0)) {
    fail(ErrorCode::NothingToMeasure, "latency before adaptation is not above the baseline");
  }
  const double post_excess = std::max(0.0, post_latency - baseline);
  return std::clamp((pre_excess - post_excess) / pre_excess, 0.0, 1.0);
}

double feedback(double pre_latency, double post_latency, const AdaptationCatalogEntry& entry,
                kb::KnowledgeBase& kb, const FeedbackContext& ctx) {
  const double i = measure_impact(pre_latency, post_latency);
  kb::KbRecord r;
  r.session_id = ctx.session_id;
  r.timestamp = ctx.timestamp;
  r.kind = kb::RecordKind::FeedbackMeasured;
  r.category = ctx.anomaly;
  r.adaptation = entry.name;
  r.impact_i = i;
  r.outcome_latency_ms = post_latency;
  kb.append(std::move(r));
  return i;
}

Recommendation recommend(const Catalog& catalog, Category anomaly, std::string_view scenario_key,
                         const RecommendationCaps& caps) {
  for (const auto& rule : catalog.rules()) {
    if (!rule.matches(anomaly, scenario_key)) continue;
    const auto& t = rule.then_branch;
    const bool fits = t.risk <= caps.risk && t.cost <= caps.cost &&
                      caps.unavailable.count(t.adaptation) == 0;
    if (fits) return {&rule, t, false};
    if (rule.else_branch) return {&rule, *rule.else_branch, true};
    fail(ErrorCode::NoRecommendation, "THEN branch rejected and rule has no ELSE");
  }
  fail(ErrorCode::NoRecommendation, "no ECA rule for " + std::string(to_string(anomaly)) +
                                        " / '" + std::string(scenario_key) + "'");
}

}  // namespace qsa::control
