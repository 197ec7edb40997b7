#include "qsadapt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qsadapt/errors.hpp"
#include "qsadapt/queue_analytics.hpp"

namespace qsa::pipeline {

std::string_view to_string(EventOutcome o) {
  switch (o) {
    case EventOutcome::Adapted: return "adapted";
    case EventOutcome::AlreadyCovered: return "covered";
    case EventOutcome::NotAdapted: return "not-adapted";
    case EventOutcome::Rejected: return "rejected";
    case EventOutcome::EnactmentFailed: return "enactment-failed";
  }
  return "?";
}

telemetry::Stream build_stream(const config::ScenarioConfig& c) {
  auto stream = telemetry::generate_baseline(c.seed, c.duration, c.step, c.session_id);
  for (const auto& sc : c.scenarios) stream = telemetry::inject(stream, sc);
  return stream;
}

decision::DecisionUnit unit_including(Category anomaly, const std::string& name,
                                      const kb::KnowledgeBase& kb,
                                      const control::Catalog& catalog, double ema_alpha) {
  const Category types[] = {anomaly};
  auto unit = std::move(decision::build_decision_units(types, kb, catalog, ema_alpha).front());
  const bool present = std::any_of(unit.tuples.begin(), unit.tuples.end(),
                                   [&](const auto& t) { return t.an == name; });
  if (!present && !name.empty()) {
    catalog.at(name);
    decision::AdaptationTuple t{name, 0, catalog.default_impact(name, anomaly)};
    for (const auto& h : kb.history(anomaly, ema_alpha)) {
      if (h.adaptation != name) continue;
      t.ct = h.ct;
      if (h.impact_i) t.i = *h.impact_i;
    }
    unit.tuples.push_back(std::move(t));
  }
  return unit;
}

control::RiskAssessment branch_risk(Category anomaly, const std::string& name,
                                    const kb::KnowledgeBase& kb, const control::Catalog& catalog,
                                    const decision::SelectionOptions& options, double ema_alpha) {
  const auto unit = unit_including(anomaly, name, kb, catalog, ema_alpha);
  return control::assess_risk(decision::likelihood_of_decision(unit, name, options),
                              decision::relative_impact(unit, name));
}

std::string free_session_id(const kb::KnowledgeBase& kb, const std::string& base) {
  if (!kb.has_session(base)) return base;
  for (int n = 2;; ++n) {
    auto id = base + "-r" + std::to_string(n);
    if (!kb.has_session(id)) return id;
  }
}

namespace {

struct Pending {
  std::size_t row = 0;
  monitor::AnomalyEvent event;
};

double excess(double latency, double baseline) { return latency - baseline; }

class Runner {
 public:
  Runner(const config::ScenarioConfig& cfg, const control::Catalog& catalog, kb::KnowledgeBase& kb)
      : cfg_(cfg),
        catalog_(catalog),
        kb_(kb),
        monitor_(cfg.thresholds),
        server_(cfg.queue, cfg.seed * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL) {
    if (cfg.active_users) catalog_.set_active_users(*cfg.active_users);
    for (const auto& [c, name] : cfg.overrides) catalog_.at(name);
  }

  RunResult go() {
    res_.session_id = free_session_id(kb_, cfg_.session_id);
    res_.adaptation_enabled = cfg_.adaptation_enabled;
    res_.duration = cfg_.duration;
    res_.raw = build_stream(cfg_);
    for (auto& s : res_.raw) s.session_id = res_.session_id;

    for (const auto& sample : res_.raw) {
      process_until(sample.timestamp);
      ingest(sample);
    }
    process_until(std::numeric_limits<double>::infinity());

    finish_queue_stats();
    finish_reductions();
    finish_trend();
    finish_recommendations();
    return std::move(res_);
  }

 private:
  double baseline() const { return cfg_.thresholds.baseline_latency_ms; }

  void ingest(const telemetry::MetricSample& sample) {
    const auto obs = control::observe(sample, active_, baseline());
    res_.observed.push_back(obs);
    for (auto& e : monitor_.evaluate(obs)) {
      e.session_id = res_.session_id;
      ++res_.detected[e.category];

      kb::KbRecord r;
      r.session_id = res_.session_id;
      r.timestamp = e.arrival_time;
      r.kind = kb::RecordKind::AnomalyDetected;
      r.category = e.category;
      r.severity_ms = e.severity;
      kb_.append(std::move(r));

      trigger_[e.id] = obs;
      index_[e.id] = res_.events.size();
      res_.events.push_back({e, std::nullopt, EventOutcome::NotAdapted, {}});

      monitor::AnomalyEvent evicted;
      switch (server_.arrive(e, &evicted)) {
        case queue::Admission::Admitted: break;
        case queue::Admission::Rejected:
          res_.events.back().outcome = EventOutcome::Rejected;
          break;
        case queue::Admission::AdmittedWithEviction:
          res_.events[index_.at(evicted.id)].outcome = EventOutcome::Rejected;
          break;
      }
    }
  }

  void process_until(double t) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (;;) {
      const double td = server_.next_departure().value_or(inf);
      const double te = pending_.empty() ? inf : pending_.begin()->first;
      if (std::min(td, te) > t || std::min(td, te) == inf) return;
      if (te <= td) {
        auto node = pending_.extract(pending_.begin());
        complete(node.key(), node.mapped());
      } else {
        depart(server_.depart());
      }
    }
  }

  void depart(queue::Departure d) {
    auto& trace = res_.events[index_.at(d.event.id)];
    trace.departure = d;
    const Category cat = d.event.category;
    if (!cfg_.adaptation_enabled) {
      trace.outcome = EventOutcome::NotAdapted;
      return;
    }
    if (covered_.count(cat)) {
      trace.outcome = EventOutcome::AlreadyCovered;
      return;
    }

    const auto forced = cfg_.overrides.find(cat);
    std::string name;
    if (forced != cfg_.overrides.end()) {
      name = forced->second;
    } else {
      const auto base = unit_including(cat, "", kb_, catalog_, cfg_.ema_alpha);
      name = decision::select_adaptation(base, catalog_, cfg_.selection).an;
    }
    const auto unit = unit_including(cat, name, kb_, catalog_, cfg_.ema_alpha);
    const auto risk =
        control::assess_risk(decision::likelihood_of_decision(unit, name, cfg_.selection),
                             decision::relative_impact(unit, name));
    const auto& entry = catalog_.at(name);
    const double rat = catalog_.resolved_rat(entry);
    const auto tuple = *std::find_if(unit.tuples.begin(), unit.tuples.end(),
                                     [&](const auto& t) { return t.an == name; });

    LedgerRow row;
    row.event_id = d.event.id;
    row.anomaly = cat;
    row.adaptation = name;
    row.description = entry.description;
    row.specific_category = entry.specific_category;
    row.overridden = forced != cfg_.overrides.end();
    row.decided_at = d.departure;
    row.effective_at = d.departure + rat;
    row.r_at = rat;
    row.cost_per_hour = entry.cost_per_hour;
    row.cost_level = control::cost_bucket(entry.cost_per_hour);
    row.threshold_effect = entry.threshold_effect.text;
    row.catalog_delta_cs = entry.delta_for(cat);
    row.risk = risk;
    row.candidates = decision::sorted_candidates(unit, catalog_, cfg_.selection);
    row.ct = decision::record_use(name, kb_, catalog_,
                                  {res_.session_id, d.departure, cat, tuple.i, rat,
                                   entry.cost_per_hour, risk.failure_risk});

    pending_.emplace(row.effective_at, Pending{res_.ledger.size(), d.event});
    res_.ledger.push_back(std::move(row));
    covered_.insert(cat);
    trace.outcome = EventOutcome::Adapted;
    trace.adaptation = name;
  }

  void complete(double effective_at, const Pending& p) {
    auto& row = res_.ledger[p.row];
    auto& trace = res_.events[index_.at(p.event.id)];
    const auto& entry = catalog_.at(row.adaptation);
    const auto& seen = trigger_.at(p.event.id);

    control::SystemState state;
    state.latency = baseline() + p.event.severity;
    state.cpu = seen.cpu_utilization;
    state.packets_out = static_cast<double>(seen.packets_out);
    state.login_attempts = static_cast<double>(seen.login_attempts);
    state.accrued_cost = res_.accrued_cost;
    const double billed = std::max(0.0, cfg_.duration - effective_at);

    control::EnactmentRecord rec;
    try {
      rec = control::enact(entry, row.anomaly, state, row.decided_at, billed, catalog_).second;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownEffect) throw;
      row.failed = true;
      row.note = e.what();
      trace.outcome = EventOutcome::EnactmentFailed;
      covered_.erase(row.anomaly);
      return;
    }
    row.pre_latency = rec.pre_latency;
    row.post_latency = rec.post_latency;
    row.cost_accrued = rec.cost_added;
    res_.accrued_cost += rec.cost_added;

    active_.push_back({entry.name, row.anomaly, rec.delta_cs, entry.threshold_effect,
                       effective_at, entry.cost_per_hour});
    active_rows_.push_back(p.row);

    kb::KbRecord r;
    r.session_id = res_.session_id;
    r.timestamp = effective_at;
    r.kind = kb::RecordKind::AdaptationEnacted;
    r.category = row.anomaly;
    r.adaptation = entry.name;
    r.rat_s = row.r_at;
    r.cost_per_hr = entry.cost_per_hour;
    r.severity_ms = p.event.severity;
    r.risk_rf = row.risk.failure_risk;
    r.outcome_latency_ms = rec.post_latency;
    kb_.append(std::move(r));

    if (rec.pre_latency > baseline()) {
      row.measured_impact = control::feedback(rec.pre_latency, rec.post_latency, entry, kb_,
                                              {res_.session_id, effective_at, row.anomaly});
    }
  }

  void finish_queue_stats() {
    const double horizon = std::max(cfg_.duration, server_.now());
    server_.advance(horizon);
    auto& st = res_.queue_stats;
    double waits = 0.0, services = 0.0, rats = 0.0;
    std::uint64_t adapted = 0;
    for (const auto& e : res_.events) {
      ++st.arrivals;
      if (e.outcome == EventOutcome::Rejected) ++st.rejected;
      if (!e.departure) continue;
      ++st.processed_total;
      if (e.event.severity > cfg_.severe_threshold_ms) ++st.processed_severe;
      waits += e.departure->wait();
      services += e.departure->service();
    }
    for (const auto& row : res_.ledger) {
      rats += row.r_at;
      ++adapted;
    }
    const auto n = static_cast<double>(st.processed_total);
    st.mean_wq = st.processed_total ? waits / n : 0.0;
    st.mean_x_bar_empirical = st.processed_total ? services / n : 0.0;
    st.mean_lq = server_.queue_area() / horizon;
    st.mean_l = server_.system_area() / horizon;
    st.effective_lambda = static_cast<double>(st.arrivals - st.rejected) / horizon;
    st.blocking_prob =
        st.arrivals ? static_cast<double>(st.rejected) / static_cast<double>(st.arrivals) : 0.0;
    if (st.arrivals) {
      st.wq_from_queue_length =
          queue::wq_from_lq(st.mean_lq, static_cast<double>(st.arrivals) / horizon);
    }
    res_.mean_rat = adapted ? rats / static_cast<double>(adapted) : 0.0;
    st.mean_rtq = queue::response_time_in_queue(st.mean_wq, st.mean_x_bar_empirical);
    st.mean_rs = queue::system_response(st.mean_rtq, res_.mean_rat);
  }

  void finish_reductions() {
    const double floor = cfg_.thresholds.latency_inflation_floor_ms;
    for (std::size_t k = 0; k < res_.raw.size(); ++k) {
      const double raw = excess(res_.raw[k].latency, baseline());
      if (raw <= floor) continue;
      res_.raw_excess_total += raw;
      res_.observed_excess_total += std::max(0.0, excess(res_.observed[k].latency, baseline()));
    }

    for (std::size_t a = 0; a < active_.size(); ++a) {
      double with = 0.0, without = 0.0;
      for (const auto& s : res_.raw) {
        if (s.timestamp < active_[a].since) continue;
        if (excess(s.latency, baseline()) <= floor) continue;
        std::vector<control::ActiveAdaptation> on, off;
        for (std::size_t b = 0; b < active_.size(); ++b) {
          if (active_[b].since > s.timestamp) continue;
          on.push_back(active_[b]);
          if (b != a) off.push_back(active_[b]);
        }
        with += excess(control::observe(s, on, baseline()).latency, baseline());
        without += excess(control::observe(s, off, baseline()).latency, baseline());
      }
      if (without > 0) res_.ledger[active_rows_[a]].stream_reduction = 1.0 - with / without;
    }
  }

  void finish_trend() {
    if (!cfg_.trend) return;
    const auto& t = *cfg_.trend;
    auto qc = cfg_.queue;
    qc.lambda = t.lambda;
    for (double h : t.horizons) {
      queue::SimOptions opt;
      opt.horizon = h;
      opt.seed = t.seed;
      opt.severe_threshold_ms = cfg_.severe_threshold_ms;
      opt.r_at = t.r_at;
      opt.mix = t.mix;
      res_.trend.push_back({h, queue::simulate(qc, opt)});
    }
  }

  void finish_recommendations() {
    for (const auto& rule : catalog_.rules()) {
      RecommendationRow row;
      row.rule = rule;
      row.then_risk = branch_risk(rule.anomaly, rule.then_branch.adaptation, kb_, catalog_,
                                  cfg_.selection, cfg_.ema_alpha);
      if (rule.else_branch) {
        row.else_risk = branch_risk(rule.anomaly, rule.else_branch->adaptation, kb_, catalog_,
                                    cfg_.selection, cfg_.ema_alpha);
      }
      try {
        const auto rec = control::recommend(catalog_, rule.anomaly, rule.scenario, cfg_.caps);
        row.chosen = rec.branch;
        row.took_else = rec.took_else;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRecommendation) throw;
      }
      res_.recommendations.push_back(std::move(row));
    }
  }

  const config::ScenarioConfig& cfg_;
  control::Catalog catalog_;
  kb::KnowledgeBase& kb_;
  monitor::Monitor monitor_;
  queue::PriorityServer server_;
  RunResult res_;

  std::vector<control::ActiveAdaptation> active_;
  std::vector<std::size_t> active_rows_;
  std::multimap<double, Pending> pending_;
  std::set<Category> covered_;
  std::map<std::uint64_t, std::size_t> index_;
  std::map<std::uint64_t, telemetry::MetricSample> trigger_;
};

}  // namespace

RunResult run(const config::ScenarioConfig& config, const control::Catalog& catalog,
              kb::KnowledgeBase& kb) {
  config::validate(config);
  return Runner(config, catalog, kb).go();
}

}  // namespace qsa::pipeline
