#include <doctest.h>

#include <cmath>

#include "qsadapt/catalog.hpp"
#include "qsadapt/control.hpp"
#include "qsadapt/rng.hpp"
#include "support.hpp"

using namespace qsa;
using namespace qsa::control;

namespace {
const Catalog& cat() { return Catalog::defaults(); }
}  // namespace

TEST_CASE("risk at the corners and in between") {
  auto r = assess_risk(1, 1);
  CHECK(r.failure_risk == 0.0);
  CHECK(r.bucket == Level::Low);
  r = assess_risk(0, 0);
  CHECK(r.failure_risk == 1.0);
  CHECK(r.bucket == Level::High);
  r = assess_risk(0.8, 0.6);
  CHECK(r.failure_risk == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r.bucket == Level::Low);
  CHECK(test::error_code_of([] { assess_risk(1.1, 0); }) == ErrorCode::InvalidArgument);
  CHECK(test::error_code_of([] { assess_risk(0, -0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("risk buckets split at thirds") {
  CHECK(risk_bucket(0.0) == Level::Low);
  CHECK(risk_bucket(1.0 / 3.0) == Level::Medium);
  CHECK(risk_bucket(0.5) == Level::Medium);
  CHECK(risk_bucket(2.0 / 3.0) == Level::High);
  CHECK(risk_bucket(1.0) == Level::High);
}

TEST_CASE("cost buckets") {
  CHECK(cost_bucket(0.23) == Level::Low);
  CHECK(cost_bucket(2.4) == Level::Medium);
  CHECK(cost_bucket(0.0) == Level::Low);
  CHECK(cost_bucket(0.25) == Level::Medium);
  CHECK(cost_bucket(2.5) == Level::High);
  CHECK(test::error_code_of([] { cost_bucket(-1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: risk is symmetric, exact and decreasing") {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const double l = rng.uniform(), i = rng.uniform();
    const auto a = assess_risk(l, i), b = assess_risk(i, l);
    CHECK(a.failure_risk == b.failure_risk);
    CHECK(std::abs(a.failure_risk - (1 - (l + i) / 2)) <= 1e-12);
    const double l2 = std::min(1.0, l + rng.uniform(1e-6, 0.5));
    CHECK(assess_risk(l2, i).failure_risk < a.failure_risk);
  }
}

TEST_CASE("property: bucket functions are monotone") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = rng.uniform(), y = rng.uniform();
    if (x <= y) {
      CHECK(risk_bucket(x) <= risk_bucket(y));
      CHECK(cost_bucket(x * 5) <= cost_bucket(y * 5));
    }
  }
}

TEST_CASE("A1 shrinks the latency excess and pins cpu") {
  SystemState s;
  s.latency = 40.0;
  s.cpu = 9;
  const auto [next, rec] = enact(cat().at("A1"), Category::QoA, s, 10, 3600, cat());
  CHECK(next.latency == doctest::Approx(23.5 + 16.5 * (1 - 0.2643)).epsilon(1e-14));
  CHECK(next.latency == doctest::Approx(35.63905));
  CHECK(next.cpu == 4);
  CHECK(next.accrued_cost == doctest::Approx(0.23));
  CHECK(next.active_adaptations.count("A1") == 1);
  CHECK(rec.r_at == doctest::Approx(0.54));
  CHECK(rec.effective_at == doctest::Approx(10.54));
}

TEST_CASE("zero delta leaves latency alone") {
  CHECK(reduce_excess(40.0, 0.0) == 40.0);
  CHECK(reduce_excess(20.0, 0.5) == 20.0);
}

TEST_CASE("an adaptation without any known effect cannot be enacted") {
  SystemState s;
  s.latency = 30;
  CHECK(test::error_code_of([&] { enact(cat().at("A3"), Category::QoA, s, 0, 0, cat()); }) ==
        ErrorCode::UnknownEffect);
  // A5 has no measured ΔCS but does set the packet floor.
  const auto [next, rec] = enact(cat().at("A5"), Category::QoS, s, 0, 0, cat());
  CHECK(next.latency == 30);
  CHECK(next.packets_out == 7280);
}

TEST_CASE("impact measurement") {
  CHECK(measure_impact(40.0, 23.5 + 16.5 * (1 - 0.2643)) == doctest::Approx(0.2643).epsilon(1e-12));
  CHECK(measure_impact(40.0, 40.0) == 0.0);
  CHECK(measure_impact(40.0, 23.5) == 1.0);
  CHECK(measure_impact(40.0, 50.0) == 0.0);
  CHECK(test::error_code_of([] { measure_impact(23.5, 20); }) == ErrorCode::NothingToMeasure);
}

TEST_CASE("feedback is stored in the knowledge base") {
  kb::KnowledgeBase kb;
  const double i = feedback(40.0, 35.639, cat().at("A1"), kb, {"s", 3.0, Category::QoA});
  CHECK(i == doctest::Approx(0.2643).epsilon(1e-4));
  REQUIRE(kb.size() == 1);
  CHECK(kb.records()[0].kind == kb::RecordKind::FeedbackMeasured);
  CHECK(*kb.history(Category::QoA)[0].impact_i == doctest::Approx(i).epsilon(1e-8));
}

TEST_CASE("property: enact then feedback recovers the catalog delta") {
  Rng rng(3);
  for (const auto& e : cat().entries()) {
    for (const auto& [c, delta] : e.delta_cs) {
      for (int trial = 0; trial < 50; ++trial) {
        SystemState s;
        s.latency = 23.5 + rng.uniform(0.1, 100);
        const auto [next, rec] = enact(e, c, s, 0, 0, cat());
        CHECK(std::abs(measure_impact(s.latency, next.latency) - delta) <= 1e-9);
      }
    }
  }
}

TEST_CASE("property: cost accrues per hour of activity") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    SystemState s;
    s.latency = 30;
    double expected = 0;
    for (const char* name : {"A1", "A4", "A8", "A1+A6"}) {
      const auto& e = cat().at(name);
      const double secs = rng.uniform(0, 10000);
      s = enact(e, e.anomaly_issue, s, 0, secs, cat()).first;
      expected += e.cost_per_hour * secs / 3600.0;
    }
    CHECK(std::abs(s.accrued_cost - expected) <= 1e-9);
  }
}

TEST_CASE("observe overlays active effects") {
  telemetry::MetricSample raw;
  raw.latency = 40;
  raw.cpu_utilization = 12;
  raw.packets_out = 20000;
  raw.login_attempts = 9;
  raw.tamper_flags = 4;
  std::vector<ActiveAdaptation> active;
  CHECK(observe(raw, active) == raw);
  for (const char* name : {"A1", "A7"}) {
    const auto& e = cat().at(name);
    active.push_back({e.name, Category::SecurityDoS, e.delta_for(Category::QoA), e.threshold_effect, 0,
                      e.cost_per_hour});
  }
  const auto s = observe(raw, active);
  CHECK(s.latency == doctest::Approx(23.5 + 16.5 * (1 - 0.2643)));
  CHECK(s.cpu_utilization == 4);
  CHECK(s.packets_out == 8000);
  CHECK(s.login_attempts == 5);
  CHECK(s.tamper_flags == 0);
}

TEST_CASE("ECA recommendations under caps") {
  auto r = recommend(cat(), Category::QoA, "improve application run time", {Level::Low, Level::Low, {}});
  CHECK(r.branch.adaptation == "A1");
  CHECK(*r.branch.delta_cs_pct == doctest::Approx(26.43));
  CHECK_FALSE(r.took_else);

  r = recommend(cat(), Category::QoS, "lower latency", {Level::Low, Level::Low, {}});
  CHECK(r.branch.adaptation == "A4");
  CHECK(*r.branch.delta_cs_pct == doctest::Approx(30.28));

  r = recommend(cat(), Category::Intrusion, "only valid users", {Level::Medium, Level::High, {"A8"}});
  CHECK(r.branch.adaptation == "A7");
  CHECK(r.took_else);

  r = recommend(cat(), Category::SecurityDoS, "content availability", {Level::Low, Level::Low, {}});
  CHECK(r.branch.adaptation == "A1+A7");

  CHECK(test::error_code_of([] {
          recommend(cat(), Category::QoA, "no such scenario", {Level::High, Level::High, {}});
        }) == ErrorCode::NoRecommendation);
}

TEST_CASE("property: recommendations are deterministic") {
  for (const auto& rule : cat().rules()) {
    for (Level l : {Level::Low, Level::Medium, Level::High}) {
      const RecommendationCaps caps{l, l, {}};
      const auto a = recommend(cat(), rule.anomaly, rule.scenario, caps);
      const auto b = recommend(cat(), rule.anomaly, rule.scenario, caps);
      CHECK(a.branch.adaptation == b.branch.adaptation);
      CHECK(a.took_else == b.took_else);
    }
  }
}

TEST_CASE("bundled catalog contents") {
  const auto& c = cat();
  CHECK(c.entries().size() == 11);
  CHECK(c.at("A1").cost_per_hour == 0.23);
  CHECK(*c.at("A1").r_at == 0.54);
  CHECK(*c.at("A4").r_at == 1.0);
  CHECK(*c.at("A7").r_at == 0.51);
  CHECK(*c.at("A2").r_at == 300);
  CHECK_FALSE(c.at("A8").r_at.has_value());
  CHECK(c.resolved_rat(c.at("A8")) == doctest::Approx(1.0));
  CHECK(*c.at("A2").delta_for(Category::QoA) == 0.1346);
  CHECK(*c.at("A1+A4").delta_for(Category::QoS) == 0.2048);
  CHECK(*c.at("A1+A4").delta_for(Category::QoA) == 0.2939);
  CHECK(c.at("A1+A6").cost_per_hour == doctest::Approx(0.73));
  CHECK(*c.at("A1+A6").r_at == 60);
  CHECK(c.at("A1+A6").threshold_effect.cpu_set == 4.0);
  CHECK(c.at("A1+A6").threshold_effect.clear_tamper);
  CHECK(c.candidates_for(Category::QoA) == std::vector<std::string>{"A1", "A2", "A3"});
  CHECK(c.default_impact("A3", Category::QoA) == c.unmeasured_impact());
  CHECK(c.rules().size() == 4);
  CHECK(test::error_code_of([&] { c.at("A9"); }) == ErrorCode::NotFound);
}

TEST_CASE("catalog overrides and validation") {
  Catalog c = cat();
  c.set_active_users(30);
  CHECK(c.resolved_rat(c.at("A8")) == doctest::Approx(3.0));
  CHECK(test::error_code_of([&] { c.set_active_users(-1); }) == ErrorCode::InvalidArgument);
  CHECK(test::error_code_of([] { Catalog::parse("{not json"); }) == ErrorCode::InvalidArgument);
  CHECK(test::error_code_of([] { Catalog::load("/nonexistent/catalog.json"); }) == ErrorCode::NotFound);
}

TEST_CASE("threshold effects combine to the stronger bound") {
  ThresholdEffect a, b;
  a.cpu_set = 6;
  a.packets_cap = 9000;
  a.text = "a";
  b.cpu_set = 4;
  b.packets_cap = 8000;
  b.logins_cap = 3;
  b.text = "b";
  const auto c = combine(a, b);
  CHECK(*c.cpu_set == 4);
  CHECK(*c.packets_cap == 8000);
  CHECK(*c.logins_cap == 3);
  CHECK(c.text == "a; b");
}
