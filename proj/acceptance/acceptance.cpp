// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or fails only for a reason
// listed in kKnownUnattainable; the FAIL lines are still printed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "qsadapt/catalog.hpp"
#include "qsadapt/config.hpp"
#include "qsadapt/control.hpp"
#include "qsadapt/decision.hpp"
#include "qsadapt/knowledge_base.hpp"
#include "qsadapt/monitor.hpp"
#include "qsadapt/pipeline.hpp"
#include "qsadapt/queue_analytics.hpp"
#include "qsadapt/queue_sim.hpp"
#include "qsadapt/report.hpp"
#include "qsadapt/rng.hpp"
#include "qsadapt/severity_heap.hpp"
#include "qsadapt/sweep.hpp"
#include "qsadapt/telemetry.hpp"

using namespace qsa;
using monitor::AnomalyEvent;

namespace {

// Pinned tolerances.
constexpr double kQueueRelTol = 0.10;
constexpr double kMinArrivals = 1e5;
constexpr double kCellSeconds = 30.0;
// Below this, a 10% blocking estimate needs more than ~1e8 arrivals.
constexpr double kRareBlocking = 1e-6;
constexpr double kLittleTol = 0.05;
constexpr double kArithTol = 1e-12;
constexpr double kReductionTolPct = 0.01;  // percentage points
constexpr double kRiskTol = 1e-12;
constexpr int kHeapSequences = 10000;
constexpr int kDecisionUnits = 1000;
constexpr int kRiskPairs = 1000;
constexpr std::size_t kBenignSamples = 10000;
constexpr std::size_t kKbFixtureRecords = 500;

// Criteria that cannot pass as stated. A failure is excused only when the
// criterion reports that nothing else went wrong; the FAIL line is printed
// regardless.
const std::map<int, const char*> kKnownUnattainable = {
    {1, "blocking near 1e-8 or below cannot be estimated to 10% from a 30 s run"},
    {7, "the DoS THEN label (M) contradicts the risk formula for the top-ranked candidate"},
};

struct Outcome {
  bool pass = false;
  std::string detail;
  // Failed only in the way described in kKnownUnattainable.
  bool explained = false;
};

const control::Catalog& catalog() { return control::Catalog::defaults(); }

double rel_err(double got, double want) {
  if (want == 0.0) return got == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(got - want) / std::abs(want);
}

queue::QueueConfig cell_config(double rho, std::size_t k) {
  // X̄ = 1 s with one dominant stage, so the service is close to exponential
  // (squared coefficient of variation 0.996).
  queue::QueueConfig c;
  c.rates = {1.0 / 0.998, 1000.0, 1000.0};
  c.lambda = rho / queue::mean_service_time(c.rates);
  c.capacity_k = k;
  return c;
}

std::vector<queue::SimStats> g_steady_runs;

// 1. DES vs closed form over the (rho, K) grid.
Outcome queueing_oracle() {
  int passed = 0, total = 0;
  bool only_rare_blocking = true;
  std::vector<std::string> misses;
  double slowest = 0.0;
  for (double rho : {0.3, 0.7, 0.95}) {
    for (std::size_t k : {5u, 20u, 50u}) {
      const auto c = cell_config(rho, k);
      const double mu = 1.0 / queue::mean_service_time(c.rates);
      const auto m = queue::mm1k_analytics(c.lambda, mu, k);
      // Enough arrivals to see a few thousand blockings where that is feasible.
      const double arrivals = std::clamp(4000.0 / m.blocking_prob, 2e6, 1.5e7);
      queue::SimOptions o;
      o.horizon = arrivals / c.lambda;
      o.warmup = 0.01 * o.horizon;
      o.seed = 1000 + static_cast<std::uint64_t>(rho * 100) * 100 + k;

      const auto t0 = std::chrono::steady_clock::now();
      const auto st = queue::simulate(c, o);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      slowest = std::max(slowest, secs);
      g_steady_runs.push_back(st);

      const double e_wq = rel_err(st.mean_wq, m.Wq);
      const double e_lq = rel_err(st.mean_lq, m.Lq);
      const double e_pb = rel_err(st.blocking_prob, m.blocking_prob);
      const bool ok = st.arrivals >= kMinArrivals && secs < kCellSeconds && e_wq <= kQueueRelTol &&
                      e_lq <= kQueueRelTol && e_pb <= kQueueRelTol;
      ++total;
      if (ok) {
        ++passed;
      } else {
        only_rare_blocking = only_rare_blocking && m.blocking_prob < kRareBlocking &&
                             st.arrivals >= kMinArrivals && secs < kCellSeconds &&
                             e_wq <= kQueueRelTol && e_lq <= kQueueRelTol;
        misses.push_back(fmt::format("rho={} K={}: Wq {:.1f}% Lq {:.1f}% Pb {:.3g} vs {:.3g}", rho, k,
                                     100 * e_wq, 100 * e_lq, st.blocking_prob, m.blocking_prob));
      }
    }
  }
  std::string detail = fmt::format("{}/{} cells within {:.0f}%, slowest cell {:.1f} s", passed, total,
                                   100 * kQueueRelTol, slowest);
  for (const auto& s : misses) detail += "; " + s;
  return {passed == total, detail, only_rare_blocking};
}

// 2. Little's law on every steady-state run (the grid above plus eviction runs).
Outcome littles_law() {
  auto runs = g_steady_runs;
  for (double rho : {0.5, 1.2}) {
    auto c = cell_config(rho, 30);
    c.overflow_policy = queue::OverflowPolicy::EvictLowestSeverity;
    queue::SimOptions o;
    o.horizon = 2e5;
    o.warmup = 2e3;
    o.seed = 77;
    runs.push_back(queue::simulate(c, o));
  }
  double worst = 0.0;
  for (const auto& st : runs) {
    worst = std::max(worst, std::abs(st.mean_lq - st.effective_lambda * st.mean_wq) / st.mean_lq);
  }
  return {worst <= kLittleTol,
          fmt::format("{} runs, worst |Lq - lambda_eff*Wq|/Lq = {:.4f}", runs.size(), worst)};
}

// 3. Service and response arithmetic; catalogued Rat values reach Rs unchanged.
Outcome response_arithmetic() {
  Rng rng(3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = std::exp(rng.uniform(-5, 5)), b = std::exp(rng.uniform(-5, 5)),
                 c = std::exp(rng.uniform(-5, 5));
    const double hand = (b * c + a * c + a * b) / (a * b * c);
    worst = std::max(worst, rel_err(queue::mean_service_time({a, b, c}), hand));
    const double rtq = rng.uniform(0, 1000), rat = rng.uniform(0, 300);
    worst = std::max(worst, std::abs(queue::system_response(rtq, rat) - (rtq + rat)));
  }
  bool rat_ok = true;
  const std::map<std::string, double> table = {{"A1", 0.54}, {"A4", 1.0}, {"A7", 0.51}};
  for (const auto& [name, rat] : table) {
    const double resolved = catalog().resolved_rat(catalog().at(name));
    queue::SimOptions o;
    o.horizon = 500;
    o.seed = 5;
    o.r_at = resolved;
    const auto st = queue::simulate(cell_config(0.5, 10), o);
    rat_ok = rat_ok && resolved == rat && st.mean_rs == st.mean_rtq + rat;
  }
  return {worst <= kArithTol && rat_ok,
          fmt::format("worst error {:.2e} over 100 cases; A1/A4/A7 Rat into Rs {}", worst,
                      rat_ok ? "exact" : "MISMATCH")};
}

// 4. Heap order against a sort oracle, heap property after every removal.
Outcome heap_correctness() {
  Rng rng(4);
  auto key = [](const AnomalyEvent& e) { return std::make_tuple(-e.severity, e.arrival_time, e.id); };
  int bad = 0;
  for (int seq = 0; seq < kHeapSequences && bad == 0; ++seq) {
    queue::SeverityHeap h;
    std::vector<AnomalyEvent> live;
    std::uint64_t next = 1;
    const auto ops = rng.uniform_int(1, 60);
    for (std::int64_t op = 0; op < ops; ++op) {
      const double u = rng.uniform();
      if (u < 0.5 || live.empty()) {
        AnomalyEvent e;
        e.id = next++;
        e.severity = static_cast<double>(rng.uniform_int(0, 6));
        e.arrival_time = static_cast<double>(rng.uniform_int(0, 10));
        live.push_back(e);
        h.insert(e);
      } else if (u < 0.75) {
        auto best = std::min_element(live.begin(), live.end(),
                                     [&](const auto& a, const auto& b) { return key(a) < key(b); });
        if (h.extract_max().id != best->id) ++bad;
        live.erase(best);
      } else {
        const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(live.size()) - 1));
        if (h.remove(live[i].id).id != live[i].id || !h.valid()) ++bad;
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    std::sort(live.begin(), live.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    for (const auto& e : live) {
      if (h.extract_max().id != e.id) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} random sequences, {} mismatches", kHeapSequences, bad)};
}

// 5. Selection against exhaustive comparison; bundled defaults pick A1 and A4.
Outcome decision_oracle() {
  Rng rng(5);
  std::vector<std::string> names;
  for (const auto& e : catalog().entries()) names.push_back(e.name);
  int bad = 0;
  for (int trial = 0; trial < kDecisionUnits; ++trial) {
    auto pool = names;
    decision::DecisionUnit u;
    const auto n = rng.uniform_int(1, 6);
    for (std::int64_t k = 0; k < n; ++k) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
      u.tuples.push_back({pool[j], rng.uniform_int(0, 3), static_cast<double>(rng.uniform_int(0, 4)) / 4});
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    auto full_key = [&](const decision::AdaptationTuple& t) {
      return std::make_tuple(-t.i, -t.ct, catalog().resolved_rat(catalog().at(t.an)), t.an);
    };
    const decision::AdaptationTuple* best = nullptr;
    for (const auto& a : u.tuples) {
      bool beaten = false;
      for (const auto& b : u.tuples) beaten = beaten || full_key(b) < full_key(a);
      if (!beaten) best = &a;
    }
    if (!best || !(decision::select_adaptation(u, catalog()) == *best)) ++bad;
  }
  kb::KnowledgeBase kb;
  const Category types[] = {Category::QoA, Category::QoS};
  const auto units = decision::build_decision_units(types, kb, catalog());
  const auto qoa = decision::select_adaptation(units[0], catalog()).an;
  const auto qos = decision::select_adaptation(units[1], catalog()).an;
  return {bad == 0 && qoa == "A1" && qos == "A4",
          fmt::format("{} random units, {} mismatches; defaults QoA -> {}, QoS -> {}", kDecisionUnits,
                      bad, qoa, qos)};
}

config::ScenarioConfig scenario_config(telemetry::ScenarioKind kind, double intensity, double lag) {
  config::ScenarioConfig c;
  c.session_id = "acc";
  c.seed = 21;
  c.duration = 900;
  c.scenarios.push_back({kind, 60, 720, intensity, lag});
  return c;
}

// 6. End-to-end reductions on latency excess.
Outcome cybersickness_reduction() {
  using telemetry::ScenarioKind;
  struct Case {
    const char* label;
    ScenarioKind kind;
    double intensity;
    Category anomaly;
    const char* adaptation;
    bool forced;
    double target_pct;
  };
  const Case cases[] = {
      {"QoA+A1", ScenarioKind::PacketDropPlusLag, 0.0, Category::QoA, "A1", false, 26.43},
      {"QoA+A2", ScenarioKind::PacketDropPlusLag, 0.0, Category::QoA, "A2", true, 13.46},
      {"QoS+A4", ScenarioKind::PacketDrop, 0.2, Category::QoS, "A4", false, 30.28},
      {"QoA+(A1+A4)", ScenarioKind::PacketDropPlusLag, 0.0, Category::QoA, "A1+A4", true, 29.39},
      {"QoS+(A1+A4)", ScenarioKind::PacketDrop, 0.2, Category::QoS, "A1+A4", true, 20.48},
      {"DoS+(A1+A6)", ScenarioKind::DoSFlood, 4.0, Category::SecurityDoS, "A1+A6", false, 36.1},
      {"UA+A8", ScenarioKind::UnauthorizedAccess, 8, Category::Intrusion, "A8", false, 20.7},
  };
  int ok = 0;
  std::string detail;
  for (const auto& cs : cases) {
    auto cfg = scenario_config(cs.kind, cs.intensity, 16.5);
    if (cs.forced) cfg.overrides[cs.anomaly] = cs.adaptation;
    kb::KnowledgeBase kb, kb_na;
    const auto r = pipeline::run(cfg, catalog(), kb);
    cfg.adaptation_enabled = false;
    const auto na = pipeline::run(cfg, catalog(), kb_na);

    double got = -1;
    for (const auto& row : r.ledger) {
      if (row.anomaly == cs.anomaly && row.adaptation == cs.adaptation && row.stream_reduction &&
          row.measured_impact &&
          std::abs(100 * *row.measured_impact - 100 * *row.stream_reduction) <= kReductionTolPct) {
        got = 100 * *row.stream_reduction;
      }
    }
    // The unmitigated run must carry the full excess the adapted run removes.
    const bool na_ok = na.ledger.empty() && na.observed_excess_total == na.raw_excess_total &&
                       na.raw_excess_total == r.raw_excess_total &&
                       r.observed_excess_total < na.observed_excess_total;
    const bool pass = got >= 0 && std::abs(got - cs.target_pct) <= kReductionTolPct && na_ok;
    ok += pass ? 1 : 0;
    detail += fmt::format("{}{} {:.4f}%", detail.empty() ? "" : ", ", cs.label, got);
  }
  return {ok == 7, fmt::format("{}/7 within {} pp ({})", ok, kReductionTolPct, detail)};
}

// 7. Risk formula and the rule table's risk labels.
Outcome risk_formula() {
  bool ok = control::assess_risk(1, 1).failure_risk == 0.0 && control::assess_risk(0, 0).failure_risk == 1.0;
  Rng rng(7);
  double worst = 0;
  for (int i = 0; i < kRiskPairs; ++i) {
    const double l = rng.uniform(), im = rng.uniform();
    const double a = control::assess_risk(l, im).failure_risk;
    ok = ok && a == control::assess_risk(im, l).failure_risk;
    worst = std::max(worst, std::abs(a - (1 - (l + im) / 2)));
  }
  ok = ok && worst <= kRiskTol;

  kb::KnowledgeBase kb;
  int match = 0, total = 0;
  bool only_dos_then = true;
  std::string misses;
  for (const auto& rule : catalog().rules()) {
    std::vector<control::EcaBranch> branches{rule.then_branch};
    if (rule.else_branch) branches.push_back(*rule.else_branch);
    for (const auto& b : branches) {
      const auto r = pipeline::branch_risk(rule.anomaly, b.adaptation, kb, catalog());
      ++total;
      if (r.bucket == b.risk) {
        ++match;
      } else {
        only_dos_then = only_dos_then && rule.anomaly == Category::SecurityDoS &&
                        b.adaptation == rule.then_branch.adaptation;
        misses += fmt::format("; {} {} computed {} (Rf {:.4f}), table {}", to_string(rule.anomaly),
                              b.adaptation, to_letter(r.bucket), r.failure_risk, to_letter(b.risk));
      }
    }
  }
  return {ok && match == total,
          fmt::format("formula {} (worst {:.1e}); labels {}/{} match{}", ok ? "exact" : "WRONG", worst,
                      match, total, misses),
          ok && only_dos_then};
}

// 8. Threshold monitor.
Outcome threshold_monitor() {
  using telemetry::ScenarioKind;
  monitor::Monitor benign;
  std::size_t alarms = 0;
  for (const auto& s : telemetry::generate_baseline(8, static_cast<double>(kBenignSamples))) {
    alarms += benign.evaluate(s).size();
  }
  const std::pair<telemetry::AnomalyScenario, Category> injected[] = {
      {{ScenarioKind::PacketDrop, 10, 20, 0.1}, Category::QoS},
      {{ScenarioKind::PacketDropPlusLag, 10, 20, 0.0, 16.5}, Category::QoA},
      {{ScenarioKind::DoSFlood, 10, 20, 3.0}, Category::SecurityDoS},
      {{ScenarioKind::DuplicationPlusTampering, 10, 20, 0.1}, Category::SecurityDoS},
      {{ScenarioKind::UnauthorizedAccess, 10, 20, 6}, Category::Intrusion},
  };
  int detected = 0;
  for (const auto& [sc, want] : injected) {
    monitor::Monitor m;
    bool hit = false;
    for (const auto& s : telemetry::inject(telemetry::generate_baseline(9, 60), sc)) {
      for (const auto& e : m.evaluate(s)) hit = hit || (e.category == want && telemetry::in_window(sc, s.timestamp));
    }
    detected += hit ? 1 : 0;
  }
  telemetry::MetricSample edge;
  edge.cpu_utilization = 8.0;
  edge.packets_out = 7280;
  edge.login_attempts = 5;
  edge.latency = 23.5;
  const bool edge_quiet = monitor::evaluate(edge, {}, 7640).empty();
  return {alarms == 0 && detected == 5 && edge_quiet,
          fmt::format("{} alarms on {} benign samples; {}/5 scenarios detected; boundary {}", alarms,
                      kBenignSamples, detected, edge_quiet ? "quiet" : "ALARMED")};
}

// 9. Severe count and the queue-table Wq (Lq / λ) grow with the horizon
// under a fixed arrival mix. The served-only mean is shown for reference: in
// overload, priority service starves low-severity events and that mean levels off.
Outcome table_trend() {
  auto c = cell_config(1.2, 1000000);
  std::uint64_t last_severe = 0;
  double last_wq = 0;
  bool ok = true;
  std::string row;
  for (double h : {250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0}) {
    queue::SimOptions o;
    o.horizon = h;
    o.seed = 9;
    const auto st = queue::simulate(c, o);
    ok = ok && st.processed_severe >= last_severe && st.wq_from_queue_length >= last_wq;
    last_severe = st.processed_severe;
    last_wq = st.wq_from_queue_length;
    row += fmt::format("{}{:.0f}s: {} severe, Wq {:.1f} (served {:.1f})", row.empty() ? "" : "; ", h,
                       st.processed_severe, st.wq_from_queue_length, st.mean_wq);
  }
  return {ok, row};
}

// 10. export -> import -> export is byte-identical.
Outcome kb_round_trip() {
  const auto dir = std::filesystem::temp_directory_path() / "qsadapt-acceptance-kb";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Rng rng(10);
  kb::KnowledgeBase kb;
  const char* names[] = {"A1", "A2", "A4", "A1+A4", "A1+A6", "A8"};
  double t = 0;
  for (std::size_t i = 0; i < kKbFixtureRecords; ++i) {
    t += rng.uniform(0, 2) / 3.0;
    kb::KbRecord r;
    r.session_id = "s" + std::to_string(i / 100);
    r.timestamp = t;
    r.category = kAllCategories[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    switch (i % 4) {
      case 0:
        r.kind = kb::RecordKind::AnomalyDetected;
        r.severity_ms = rng.uniform(0, 40) / 7.0;
        break;
      case 1:
        r.kind = kb::RecordKind::DecisionMade;
        r.adaptation = names[rng.uniform_int(0, 5)];
        r.ct = rng.uniform_int(1, 99);
        r.impact_i = rng.uniform();
        r.risk_rf = rng.uniform();
        break;
      case 2:
        r.kind = kb::RecordKind::AdaptationEnacted;
        r.adaptation = names[rng.uniform_int(0, 5)];
        r.rat_s = rng.uniform(0, 300);
        r.cost_per_hr = rng.uniform(0, 3);
        r.outcome_latency_ms = 23.5 + rng.uniform(0, 10) / 3.0;
        break;
      default:
        r.kind = kb::RecordKind::FeedbackMeasured;
        r.adaptation = names[rng.uniform_int(0, 5)];
        r.impact_i = rng.uniform();
        break;
    }
    kb.append(r);
  }
  kb.export_csv(dir / "first.csv");
  kb::KnowledgeBase back;
  back.import_csv(dir / "first.csv");
  back.export_csv(dir / "second.csv");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto a = slurp(dir / "first.csv"), b = slurp(dir / "second.csv");
  std::filesystem::remove_all(dir);
  return {a == b && back.size() == kKbFixtureRecords,
          fmt::format("{} records, {} bytes, {}", back.size(), a.size(), a == b ? "identical" : "DIFFERENT")};
}

// 11. Two runs with the same config and seed write identical reports.
Outcome determinism() {
  auto cfg = scenario_config(telemetry::ScenarioKind::PacketDropPlusLag, 0.2, 16.5);
  cfg.scenarios.push_back({telemetry::ScenarioKind::DoSFlood, 400, 200, 4.0, 20});
  cfg.scenarios.push_back({telemetry::ScenarioKind::UnauthorizedAccess, 650, 100, 9, 6});
  cfg.queue.overflow_policy = queue::OverflowPolicy::EvictLowestSeverity;
  cfg.trend = config::TrendConfig{6.0, {60, 300, 900}, 0.54, 5, {}};
  const auto root = std::filesystem::temp_directory_path() / "qsadapt-acceptance-det";
  std::filesystem::remove_all(root);
  std::vector<std::string> runs[2];
  for (int k = 0; k < 2; ++k) {
    auto kb = kb::KnowledgeBase::open(root / fmt::format("kb{}.csv", k));
    const auto r = pipeline::run(cfg, catalog(), kb);
    for (const auto& p : report::write_all(r, root / fmt::format("rep{}", k))) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      runs[k].push_back(ss.str());
    }
  }
  std::filesystem::remove_all(root);
  std::size_t bytes = 0;
  for (const auto& s : runs[0]) bytes += s.size();
  return {runs[0] == runs[1] && bytes > 0,
          fmt::format("{} report files, {} bytes, {}", runs[0].size(), bytes,
                      runs[0] == runs[1] ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"queueing oracle equivalence", queueing_oracle},
      {"Little's law", littles_law},
      {"service and response arithmetic", response_arithmetic},
      {"priority heap correctness", heap_correctness},
      {"decision oracle", decision_oracle},
      {"latency-excess reduction", cybersickness_reduction},
      {"risk formula and labels", risk_formula},
      {"threshold monitor", threshold_monitor},
      {"queue trend with horizon", table_trend},
      {"knowledge-base round trip", kb_round_trip},
      {"report determinism", determinism},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const auto known = kKnownUnattainable.find(id);
    const bool excused = !o.pass && o.explained && known != kKnownUnattainable.end();
    std::string note;
    if (excused) note = fmt::format(" [known: {}]", known->second);
    if (!o.pass && !excused) ++unexpected;
    fmt::print("{} {:>2} {}: {}{}\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail, note);
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
