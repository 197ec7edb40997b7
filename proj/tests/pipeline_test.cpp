#include <doctest.h>

#include <cmath>

#include "qsadapt/config.hpp"
#include "qsadapt/pipeline.hpp"
#include "qsadapt/report.hpp"
#include "support.hpp"

using namespace qsa;

namespace {

const control::Catalog& cat() { return control::Catalog::defaults(); }

config::ScenarioConfig scenario(telemetry::ScenarioKind kind, double intensity, double lag = 16.5) {
  config::ScenarioConfig c;
  c.session_id = "t";
  c.seed = 3;
  c.duration = 900;
  telemetry::AnomalyScenario sc{kind, 60, 720, intensity, lag};
  c.scenarios.push_back(sc);
  return c;
}

const pipeline::LedgerRow* row_for(const pipeline::RunResult& r, Category c) {
  for (const auto& row : r.ledger) {
    if (row.anomaly == c) return &row;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("config parsing resolves paths and applies sections") {
  test::TempDir dir;
  const auto c = config::parse(R"({
    "session_id": "x",
    "telemetry": {"seed": 9, "duration": 60, "scenarios": [{"kind": "DoSFlood", "start": 1, "duration": 5, "intensity": 3}]},
    "monitor": {"qoa_max_cpu": 9, "default_severity_ms": {"QoA": 4}},
    "queue": {"mu": [1, 2, 3], "capacity": 7, "overflow_policy": "EvictLowestSeverity"},
    "decision": {"ct_descending": false, "overrides": {"QoA": "A2"}},
    "control": {"active_users": 4, "risk_cap": "M", "unavailable": ["A8"]},
    "kb_path": "sub/kb.csv",
    "report_dir": "/tmp/abs"
  })", dir.path());
  CHECK(c.session_id == "x");
  CHECK(c.seed == 9);
  CHECK(c.scenarios.at(0).cpu_load == std::nullopt);
  CHECK(c.thresholds.qoa_max_cpu == 9);
  CHECK(c.thresholds.default_severity_ms.at(Category::QoA) == 4);
  CHECK(c.queue.rates.mu2 == 2);
  CHECK(c.queue.capacity_k == 7);
  CHECK(c.queue.overflow_policy == queue::OverflowPolicy::EvictLowestSeverity);
  CHECK_FALSE(c.selection.ct_descending);
  CHECK(c.overrides.at(Category::QoA) == "A2");
  CHECK(*c.active_users == 4);
  CHECK(c.caps.risk == Level::Medium);
  CHECK(c.caps.unavailable.count("A8") == 1);
  CHECK(c.kb_path == dir.path() / "sub/kb.csv");
  CHECK(c.report_dir == "/tmp/abs");
}

TEST_CASE("config errors") {
  auto code = [](const std::string& text) {
    return test::error_code_of([&] { config::parse(text, "/tmp"); });
  };
  CHECK(code("{") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"telemetery": {}})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"telemetry": {"duration": 0}})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"queue": {"mu": [1, 2]}})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"queue": {"overflow_policy": "drop"}})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"catalog": "missing.json"})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"monitor": {"default_severity_ms": {"Weather": 1}}})") == ErrorCode::UnknownAnomalyType);
  CHECK(code(R"({"telemetry": {"scenarios": [{"kind": "Meteor", "start": 0, "duration": 1}]}})") ==
        ErrorCode::InvalidArgument);
  CHECK(test::error_code_of([] { config::load("/nonexistent/config.json"); }) == ErrorCode::NotFound);
}

TEST_CASE("benign run: no anomalies, no adaptations") {
  config::ScenarioConfig c;
  c.duration = 600;
  kb::KnowledgeBase kb;
  const auto r = pipeline::run(c, cat(), kb);
  CHECK(r.events.empty());
  CHECK(r.ledger.empty());
  CHECK(r.accrued_cost == 0.0);
  CHECK(kb.size() == 0);
  CHECK(report::summary_text(r).find("adaptations          0") != std::string::npos);
}

TEST_CASE("QoA scenario picks A1 and reduces excess by its catalog delta") {
  auto c = scenario(telemetry::ScenarioKind::PacketDropPlusLag, 0.0);
  kb::KnowledgeBase kb;
  const auto r = pipeline::run(c, cat(), kb);
  const auto* row = row_for(r, Category::QoA);
  REQUIRE(row);
  CHECK(row->adaptation == "A1");
  CHECK(*row->catalog_delta_cs == 0.2643);
  CHECK(*row->measured_impact == doctest::Approx(0.2643).epsilon(1e-9));
  CHECK(*row->stream_reduction == doctest::Approx(0.2643).epsilon(1e-9));
  CHECK(row->effective_at == doctest::Approx(row->decided_at + 0.54));
  CHECK(r.ledger.size() == 1);
  CHECK(report::ledger_text(r).find("26.43") != std::string::npos);

  // KB trail: detection, decision, enactment, feedback.
  std::map<kb::RecordKind, int> kinds;
  for (const auto& rec : kb.records()) ++kinds[rec.kind];
  CHECK(kinds[kb::RecordKind::AnomalyDetected] >= 1);
  CHECK(kinds[kb::RecordKind::DecisionMade] == 1);
  CHECK(kinds[kb::RecordKind::AdaptationEnacted] == 1);
  CHECK(kinds[kb::RecordKind::FeedbackMeasured] == 1);
}

TEST_CASE("without adaptation the excess persists through the window") {
  auto c = scenario(telemetry::ScenarioKind::PacketDropPlusLag, 0.0);
  c.adaptation_enabled = false;
  kb::KnowledgeBase kb;
  const auto r = pipeline::run(c, cat(), kb);
  CHECK(r.ledger.empty());
  CHECK(r.observed == r.raw);
  CHECK(r.observed_excess_total == r.raw_excess_total);
  std::size_t lagged = 0;
  for (const auto& s : r.observed) {
    if (s.timestamp >= 60 && s.timestamp < 780) lagged += s.latency - 23.5 > 10 ? 1 : 0;
  }
  CHECK(lagged == 720);
  CHECK(r.events.size() == 720);
}

TEST_CASE("an adaptation without effect fails and is reported") {
  auto c = scenario(telemetry::ScenarioKind::PacketDropPlusLag, 0.0);
  c.overrides[Category::QoA] = "A3";
  kb::KnowledgeBase kb;
  const auto r = pipeline::run(c, cat(), kb);
  REQUIRE_FALSE(r.ledger.empty());
  CHECK(r.ledger[0].failed);
  CHECK(r.ledger[0].adaptation == "A3");
}

TEST_CASE("unknown override name is rejected") {
  auto c = scenario(telemetry::ScenarioKind::PacketDropPlusLag, 0.0);
  c.overrides[Category::QoA] = "A42";
  kb::KnowledgeBase kb;
  CHECK(test::error_code_of([&] { pipeline::run(c, cat(), kb); }) == ErrorCode::NotFound);
}

TEST_CASE("accrued cost is cost rate times active time") {
  auto c = scenario(telemetry::ScenarioKind::DoSFlood, 4.0, 20);
  kb::KnowledgeBase kb;
  const auto r = pipeline::run(c, cat(), kb);
  double expected = 0;
  for (const auto& row : r.ledger) {
    expected += row.cost_per_hour * std::max(0.0, c.duration - row.effective_at) / 3600.0;
  }
  CHECK(r.ledger.size() >= 2);
  CHECK(std::abs(r.accrued_cost - expected) <= 1e-9);
}

TEST_CASE("repeat runs in one store get fresh session ids") {
  auto c = scenario(telemetry::ScenarioKind::UnauthorizedAccess, 8, 5);
  kb::KnowledgeBase kb;
  CHECK(pipeline::run(c, cat(), kb).session_id == "t");
  CHECK(pipeline::run(c, cat(), kb).session_id == "t-r2");
  const auto third = pipeline::run(c, cat(), kb);
  CHECK(third.session_id == "t-r3");
  CHECK(third.ledger.at(0).ct == 3);
}

TEST_CASE("identical inputs give byte-identical reports; separate stores do not interact") {
  test::TempDir dir;
  auto c = scenario(telemetry::ScenarioKind::PacketDropPlusLag, 0.3);
  c.scenarios.push_back({telemetry::ScenarioKind::UnauthorizedAccess, 300, 100, 7, 4});
  c.trend = config::TrendConfig{4.0, {50, 100, 200}, 0.54, 2, {}};
  std::vector<std::string> texts[2];
  for (int k = 0; k < 2; ++k) {
    auto kb = kb::KnowledgeBase::open(dir / ("kb" + std::to_string(k) + ".csv"));
    const auto r = pipeline::run(c, cat(), kb);
    for (const auto& p : report::write_all(r, dir / ("rep" + std::to_string(k)))) {
      texts[k].push_back(test::slurp(p));
    }
  }
  CHECK(texts[0] == texts[1]);
  CHECK(test::slurp(dir / "kb0.csv") == test::slurp(dir / "kb1.csv"));
}

TEST_CASE("branch risk for the catalogued rules") {
  kb::KnowledgeBase kb;
  auto level = [&](Category c, const char* an) { return pipeline::branch_risk(c, an, kb, cat()).bucket; };
  CHECK(level(Category::QoA, "A1") == Level::Low);
  CHECK(level(Category::QoA, "A2") == Level::Medium);
  CHECK(level(Category::QoS, "A4") == Level::Low);
  CHECK(level(Category::QoS, "A1+A4") == Level::Low);
  CHECK(level(Category::Intrusion, "A8") == Level::Low);
  CHECK(level(Category::Intrusion, "A7") == Level::Medium);
  CHECK(level(Category::SecurityDoS, "A1+A7") == Level::Medium);
  // Off-list adaptations join the unit for scoring.
  CHECK(pipeline::branch_risk(Category::QoA, "A1+A4", kb, cat()).likelihood == 1.0);
}
