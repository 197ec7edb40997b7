#include <doctest.h>

#include <algorithm>

#include "qsadapt/decision.hpp"
#include "qsadapt/rng.hpp"
#include "support.hpp"

using namespace qsa;
using namespace qsa::decision;

namespace {

const control::Catalog& cat() { return control::Catalog::defaults(); }

// Exhaustive argmax: the tuple no other tuple beats on the full key.
AdaptationTuple oracle_best(const DecisionUnit& u, bool ct_desc) {
  for (const auto& cand : u.tuples) {
    bool beaten = false;
    for (const auto& other : u.tuples) {
      if (&other == &cand) continue;
      const double rc = cat().resolved_rat(cat().at(cand.an));
      const double ro = cat().resolved_rat(cat().at(other.an));
      const auto ck = ct_desc ? -cand.ct : cand.ct;
      const auto ok = ct_desc ? -other.ct : other.ct;
      if (std::make_tuple(-other.i, ok, ro, other.an) < std::make_tuple(-cand.i, ck, rc, cand.an)) {
        beaten = true;
      }
    }
    if (!beaten) return cand;
  }
  FAIL("no maximum");
  return {};
}

DecisionUnit random_unit(Rng& rng) {
  std::vector<std::string> names;
  for (const auto& e : cat().entries()) names.push_back(e.name);
  for (std::size_t i = names.size(); i > 1; --i) {
    std::swap(names[i - 1], names[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  DecisionUnit u;
  const auto n = rng.uniform_int(1, 6);
  for (std::int64_t k = 0; k < n; ++k) {
    // Coarse values so ties on i and ct are common.
    u.tuples.push_back({names[static_cast<std::size_t>(k)], rng.uniform_int(0, 3),
                        static_cast<double>(rng.uniform_int(0, 4)) / 4.0});
  }
  return u;
}

}  // namespace

TEST_CASE("units for an empty store come from the catalog") {
  kb::KnowledgeBase kb;
  const Category types[] = {Category::QoA};
  const auto units = build_decision_units(types, kb, cat());
  REQUIRE(units.size() == 1);
  const std::vector<AdaptationTuple> want{{"A1", 0, 0.2643}, {"A2", 0, 0.1346},
                                          {"A3", 0, cat().unmeasured_impact()}};
  CHECK(units[0].tuples == want);
}

TEST_CASE("units keep input order and arity") {
  kb::KnowledgeBase kb;
  CHECK(build_decision_units({}, kb, cat()).empty());
  const Category types[] = {Category::QoS, Category::QoA};
  const auto units = build_decision_units(types, kb, cat());
  REQUIRE(units.size() == 2);
  CHECK(units[0].anomaly_type == Category::QoS);
  CHECK(units[1].anomaly_type == Category::QoA);
}

TEST_CASE("units take ct and impact from history") {
  kb::KnowledgeBase kb;
  record_use("A2", kb, cat(), {"s", 1, Category::QoA});
  kb::KbRecord r;
  r.session_id = "s";
  r.timestamp = 2;
  r.kind = kb::RecordKind::FeedbackMeasured;
  r.category = Category::QoA;
  r.adaptation = "A2";
  r.impact_i = 0.5;
  kb.append(r);
  const Category types[] = {Category::QoA};
  const auto u = build_decision_units(types, kb, cat())[0];
  CHECK(u.tuples[1] == AdaptationTuple{"A2", 1, 0.5});
  CHECK(select_adaptation(u, cat()).an == "A2");
}

TEST_CASE("selection examples") {
  CHECK(select_adaptation({Category::QoA, {{"A1", 3, 0.2643}, {"A2", 5, 0.1346}}}, cat()).an == "A1");
  CHECK(select_adaptation({Category::QoS, {{"A5", 0, 0.3028}, {"A4", 0, 0.3028}}}, cat()).an == "A4");
  CHECK(select_adaptation({Category::QoS, {{"A5", 2, 0.1}}}, cat()).an == "A5");
  CHECK(test::error_code_of([] { select_adaptation({Category::QoS, {}}, cat()); }) ==
        ErrorCode::NoCandidates);
}

TEST_CASE("usage count breaks impact ties, in either direction") {
  const DecisionUnit u{Category::QoA, {{"A2", 1, 0.2}, {"A1", 4, 0.2}}};
  CHECK(select_adaptation(u, cat()).an == "A1");
  CHECK(select_adaptation(u, cat(), {false}).an == "A2");
}

TEST_CASE("defaults pick A1 for QoA and A4 for QoS") {
  kb::KnowledgeBase kb;
  const Category types[] = {Category::QoA, Category::QoS, Category::SecurityDoS, Category::Intrusion};
  const auto units = build_decision_units(types, kb, cat());
  CHECK(select_adaptation(units[0], cat()).an == "A1");
  CHECK(select_adaptation(units[1], cat()).an == "A4");
  CHECK(select_adaptation(units[2], cat()).an == "A1+A6");
  CHECK(select_adaptation(units[3], cat()).an == "A8");
}

TEST_CASE("likelihood of decision ranks by impact and count with shared ties") {
  const DecisionUnit u{Category::QoA, {{"A1", 0, 0.3}, {"A2", 0, 0.2}, {"A3", 0, 0.2}, {"A1+A4", 0, 0.1}}};
  CHECK(likelihood_of_decision(u, "A1") == 1.0);
  CHECK(likelihood_of_decision(u, "A2") == 0.75);
  CHECK(likelihood_of_decision(u, "A3") == 0.75);
  CHECK(likelihood_of_decision(u, "A1+A4") == 0.25);
  CHECK(relative_impact(u, "A2") == doctest::Approx(2.0 / 3.0));
  CHECK(test::error_code_of([&] { likelihood_of_decision(u, "A8"); }) == ErrorCode::NotFound);
  CHECK(relative_impact({Category::QoA, {{"A3", 0, 0.0}}}, "A3") == 0.0);
}

TEST_CASE("record_use increments the stored count") {
  kb::KnowledgeBase kb;
  for (int i = 0; i < 3; ++i) record_use("A1", kb, cat(), {"s", double(i), Category::QoA});
  CHECK(record_use("A1", kb, cat(), {"s", 3, Category::QoA}) == 4);
  CHECK(record_use("A8", kb, cat(), {"s", 4, Category::Intrusion}) == 1);
  const auto before = kb.history(Category::QoS);
  record_use("A4", kb, cat(), {"s", 5, Category::QoS});
  record_use("A4", kb, cat(), {"s", 6, Category::QoS});
  CHECK(kb.history(Category::QoS)[0].ct == 2);
  CHECK(before.empty());
  CHECK(test::error_code_of([&] { record_use("Z9", kb, cat(), {"s", 7, Category::QoS}); }) ==
        ErrorCode::NotFound);
}

TEST_CASE("property: selection equals the exhaustive maximum") {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto u = random_unit(rng);
    const bool desc = rng.uniform() < 0.5;
    CHECK(select_adaptation(u, cat(), {desc}) == oracle_best(u, desc));
    CHECK(sorted_candidates(u, cat(), {desc}).front() == oracle_best(u, desc));
  }
}

TEST_CASE("property: tuple order does not change the choice") {
  Rng rng(56);
  for (int trial = 0; trial < 500; ++trial) {
    auto u = random_unit(rng);
    const auto first = select_adaptation(u, cat());
    std::reverse(u.tuples.begin(), u.tuples.end());
    CHECK(select_adaptation(u, cat()) == first);
    std::rotate(u.tuples.begin(), u.tuples.begin() + 1, u.tuples.end());
    CHECK(select_adaptation(u, cat()) == first);
  }
}

TEST_CASE("property: deciding for one type leaves other units alone") {
  kb::KnowledgeBase kb;
  const Category types[] = {Category::QoA, Category::QoS, Category::SecurityDoS, Category::Intrusion};
  const auto before = build_decision_units(types, kb, cat());
  double t = 0;
  for (int i = 0; i < 5; ++i) record_use(select_adaptation(before[1], cat()).an, kb, cat(), {"s", t++, Category::QoS});
  const auto after = build_decision_units(types, kb, cat());
  CHECK(after[0].tuples == before[0].tuples);
  CHECK(after[2].tuples == before[2].tuples);
  CHECK(after[3].tuples == before[3].tuples);
  CHECK(after[1].tuples != before[1].tuples);
}
