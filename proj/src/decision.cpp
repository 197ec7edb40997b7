#include "qsadapt/decision.hpp"

#include <algorithm>

#include "qsadapt/errors.hpp"

namespace qsa::decision {

std::vector<DecisionUnit> build_decision_units(std::span<const Category> anomaly_types,
                                               const kb::KnowledgeBase& kb,
                                               const control::Catalog& catalog,
                                               double ema_alpha) {
  std::vector<DecisionUnit> units;
  units.reserve(anomaly_types.size());
  for (const Category type : anomaly_types) {
    const auto& candidates = catalog.candidates_for(type);
    const auto history = kb.history(type, ema_alpha);
    DecisionUnit unit{type, {}};
    for (const auto& name : candidates) {
      AdaptationTuple t{name, 0, catalog.default_impact(name, type)};
      auto h = std::find_if(history.begin(), history.end(),
                            [&](const kb::AdaptationHistory& x) { return x.adaptation == name; });
      if (h != history.end()) {
        t.ct = h->ct;
        if (h->impact_i) t.i = *h->impact_i;
      }
      unit.tuples.push_back(std::move(t));
    }
    units.push_back(std::move(unit));
  }
  return units;
}

namespace {

int compare_metrics(const AdaptationTuple& a, const AdaptationTuple& b,
                    const SelectionOptions& opt) {
  if (a.i != b.i) return a.i > b.i ? -1 : 1;
  if (a.ct != b.ct) return (a.ct > b.ct) == opt.ct_descending ? -1 : 1;
  return 0;
}

}  // namespace

bool ranks_before(const AdaptationTuple& a, const AdaptationTuple& b,
                  const control::Catalog& catalog, const SelectionOptions& options) {
  if (int c = compare_metrics(a, b, options)) return c < 0;
  const double ra = catalog.resolved_rat(catalog.at(a.an));
  const double rb = catalog.resolved_rat(catalog.at(b.an));
  if (ra != rb) return ra < rb;
  return a.an < b.an;
}

std::vector<AdaptationTuple> sorted_candidates(const DecisionUnit& unit,
                                               const control::Catalog& catalog,
                                               const SelectionOptions& options) {
  auto out = unit.tuples;
  std::sort(out.begin(), out.end(), [&](const AdaptationTuple& a, const AdaptationTuple& b) {
    return ranks_before(a, b, catalog, options);
  });
  return out;
}

AdaptationTuple select_adaptation(const DecisionUnit& unit, const control::Catalog& catalog,
                                  const SelectionOptions& options) {
  if (unit.tuples.empty()) {
    fail(ErrorCode::NoCandidates,
         "decision unit for " + std::string(to_string(unit.anomaly_type)) + " is empty");
  }
  return *std::min_element(unit.tuples.begin(), unit.tuples.end(),
                           [&](const AdaptationTuple& a, const AdaptationTuple& b) {
                             return ranks_before(a, b, catalog, options);
                           });
}

namespace {

const AdaptationTuple& find_tuple(const DecisionUnit& unit, const std::string& name) {
  for (const auto& t : unit.tuples) {
    if (t.an == name) return t;
  }
  fail(ErrorCode::NotFound, name + " is not a candidate for " +
                                std::string(to_string(unit.anomaly_type)));
}

}  // namespace

double likelihood_of_decision(const DecisionUnit& unit, const std::string& name,
                              const SelectionOptions& options) {
  const auto& me = find_tuple(unit, name);
  std::size_t ahead = 0;
  for (const auto& t : unit.tuples) {
    if (compare_metrics(t, me, options) < 0) ++ahead;
  }
  const auto n = static_cast<double>(unit.tuples.size());
  return 1.0 - static_cast<double>(ahead) / n;
}

double relative_impact(const DecisionUnit& unit, const std::string& name) {
  const auto& me = find_tuple(unit, name);
  double best = 0.0;
  for (const auto& t : unit.tuples) best = std::max(best, t.i);
  return best > 0 ? me.i / best : 0.0;
}

std::int64_t record_use(const std::string& an, kb::KnowledgeBase& kb,
                        const control::Catalog& catalog, const UseContext& ctx) {
  std::int64_t ct = 0;
  bool known = catalog.find(an) != nullptr;
  for (const auto& h : kb.history(ctx.anomaly)) {
    if (h.adaptation == an) {
      ct = h.ct;
      known = true;
    }
  }
  if (!known) fail(ErrorCode::NotFound, "adaptation '" + an + "' is unknown");

  kb::KbRecord r;
  r.session_id = ctx.session_id;
  r.timestamp = ctx.timestamp;
  r.kind = kb::RecordKind::DecisionMade;
  r.category = ctx.anomaly;
  r.adaptation = an;
  r.ct = ct + 1;
  r.impact_i = ctx.impact_i;
  r.rat_s = ctx.rat_s;
  r.cost_per_hr = ctx.cost_per_hr;
  r.risk_rf = ctx.risk_rf;
  kb.append(std::move(r));
  return ct + 1;
}

}  // namespace qsa::decision
