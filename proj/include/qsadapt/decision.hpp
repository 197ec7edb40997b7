#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsadapt/catalog.hpp"
#include "qsadapt/knowledge_base.hpp"
#include "qsadapt/types.hpp"

namespace qsa::decision {

/// (An, Ct, I): adaptation name, times chosen, historical cybersickness impact.
struct AdaptationTuple {
  std::string an;
  std::int64_t ct = 0;
  double i = 0.0;

  bool operator==(const AdaptationTuple&) const = default;
};

struct DecisionUnit {
  Category anomaly_type = Category::QoA;
  std::vector<AdaptationTuple> tuples;
};

struct SelectionOptions {
  /// Prefer frequently chosen adaptations on equal impact. Flip to prefer
  /// the less-used one.
  bool ct_descending = true;
};

/// One unit per anomaly type, in input order. Each candidate from the
/// catalog's list for that type takes (ct, i) from the knowledge base when it
/// has history there, otherwise (0, catalog ΔCS or the unmeasured floor).
///
/// Throws Error(UnknownAnomalyType) for a type without candidates.
std::vector<DecisionUnit> build_decision_units(std::span<const Category> anomaly_types,
                                               const kb::KnowledgeBase& kb,
                                               const control::Catalog& catalog,
                                               double ema_alpha = 0.5);

/// True when `a` sorts ahead of `b`: higher i, then ct (per options), then
/// shorter enactment time, then name.
bool ranks_before(const AdaptationTuple& a, const AdaptationTuple& b,
                  const control::Catalog& catalog, const SelectionOptions& options = {});

/// Candidates in decision order.
std::vector<AdaptationTuple> sorted_candidates(const DecisionUnit& unit,
                                               const control::Catalog& catalog,
                                               const SelectionOptions& options = {});

/// Head of the sorted candidate list. Throws Error(NoCandidates) on an empty unit.
AdaptationTuple select_adaptation(const DecisionUnit& unit, const control::Catalog& catalog,
                                  const SelectionOptions& options = {});

/// Likelihood of decision L(D) = 1 - (rank - 1) / n, where rank orders the
/// unit by the decision metrics (i, then ct) and tied tuples share the best
/// rank. Throws Error(NotFound) if `name` is not in the unit.
double likelihood_of_decision(const DecisionUnit& unit, const std::string& name,
                              const SelectionOptions& options = {});

/// Impact of `name` relative to the best impact in the unit, in [0, 1].
double relative_impact(const DecisionUnit& unit, const std::string& name);

struct UseContext {
  std::string session_id;
  double timestamp = 0.0;
  Category anomaly = Category::QoA;
  std::optional<double> impact_i;
  std::optional<double> rat_s;
  std::optional<double> cost_per_hr;
  std::optional<double> risk_rf;
};

/// Increments and persists the usage count of `an` for the context's anomaly
/// type and returns the new count. Throws Error(NotFound) if `an` is unknown
/// to both catalog and knowledge base.
std::int64_t record_use(const std::string& an, kb::KnowledgeBase& kb,
                        const control::Catalog& catalog, const UseContext& ctx);

}  // namespace qsa::decision
