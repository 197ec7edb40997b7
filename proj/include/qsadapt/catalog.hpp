#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsadapt/types.hpp"

namespace qsa::control {

/// Post-condition an adaptation imposes on system metrics.
struct ThresholdEffect {
  std::string text;
  std::optional<double> cpu_set;        // cpu <- min(cpu, v)
  std::optional<double> packets_floor;  // packets_out <- max(packets_out, v)
  std::optional<double> packets_cap;    // packets_out <- min(packets_out, v)
  std::optional<double> logins_cap;     // login_attempts <- min(login_attempts, v)
  bool clear_tamper = false;

  bool empty() const {
    return !cpu_set && !packets_floor && !packets_cap && !logins_cap && !clear_tamper;
  }
};

/// Merges two effects; on conflicts the stronger bound wins.
ThresholdEffect combine(const ThresholdEffect& a, const ThresholdEffect& b);

struct AdaptationCatalogEntry {
  std::string name;
  std::string description;
  Category anomaly_issue = Category::QoA;
  std::string specific_category;
  double cost_per_hour = 0.0;
  std::optional<double> r_at;  // unset: varies with active user count
  std::map<Category, double> delta_cs;  // measured fractional reduction per anomaly
  ThresholdEffect threshold_effect;
  std::vector<std::string> parts;  // non-empty for combinations

  std::optional<double> delta_for(Category c) const;
  bool is_combination() const { return !parts.empty(); }
};

struct EcaBranch {
  std::string adaptation;
  Level risk = Level::Low;
  Level cost = Level::Low;
  std::optional<double> delta_cs_pct;
};

/// IF anomaly/scenario THEN branch ELSE fallback.
struct EcaRule {
  Category anomaly = Category::QoA;
  std::string scenario;
  EcaBranch then_branch;
  std::optional<EcaBranch> else_branch;

  /// Case-insensitive substring match of `key` against the scenario text.
  bool matches(Category anomaly, std::string_view key) const;
};

/// Adaptation catalog, per-anomaly candidate lists and ECA rules.
class Catalog {
 public:
  static Catalog load(const std::filesystem::path& path);
  static Catalog parse(std::string_view json_text);
  /// The catalog bundled with the build (data/catalog.json).
  static const Catalog& defaults();

  const std::vector<AdaptationCatalogEntry>& entries() const { return entries_; }
  const std::vector<EcaRule>& rules() const { return rules_; }

  const AdaptationCatalogEntry* find(std::string_view name) const;
  /// Throws Error(NotFound).
  const AdaptationCatalogEntry& at(std::string_view name) const;

  /// Candidate names for an anomaly type in catalog order. Throws
  /// Error(UnknownAnomalyType) when none are configured.
  const std::vector<std::string>& candidates_for(Category c) const;

  /// Enactment time in seconds, resolving the per-user "varies" case.
  double resolved_rat(const AdaptationCatalogEntry& e) const;

  /// Catalog ΔCS for (adaptation, anomaly) or the unmeasured floor.
  double default_impact(std::string_view name, Category c) const;

  double unmeasured_impact() const { return unmeasured_impact_; }
  double rat_per_user() const { return rat_per_user_; }
  int active_users() const { return active_users_; }
  void set_active_users(int users);

 private:
  void check() const;

  std::vector<AdaptationCatalogEntry> entries_;
  std::map<Category, std::vector<std::string>> candidates_;
  std::vector<EcaRule> rules_;
  double unmeasured_impact_ = 0.05;
  double rat_per_user_ = 0.1;
  int active_users_ = 10;
};

}  // namespace qsa::control
