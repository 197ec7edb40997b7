#include "qsadapt/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsadapt/errors.hpp"
#include "default_catalog.inc"

namespace qsa::control {

using nlohmann::json;

namespace {

template <typename T>
std::optional<T> tighter(const std::optional<T>& a, const std::optional<T>& b, bool lower) {
  if (!a) return b;
  if (!b) return a;
  return lower ? std::min(*a, *b) : std::max(*a, *b);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Category category_field(const json& j, const char* key) {
  return category_from_string(j.at(key).get<std::string>());
}

ThresholdEffect parse_effect(const json& j) {
  ThresholdEffect e;
  if (j.is_null()) return e;
  e.text = j.value("text", "");
  auto num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  e.cpu_set = num("cpu_set");
  e.packets_floor = num("packets_floor");
  e.packets_cap = num("packets_cap");
  e.logins_cap = num("logins_cap");
  e.clear_tamper = j.value("clear_tamper", false);
  return e;
}

EcaBranch parse_branch(const json& j) {
  EcaBranch b;
  b.adaptation = j.at("adaptation").get<std::string>();
  auto level = [&](const char* key) {
    auto l = parse_level(j.at(key).get<std::string>());
    if (!l) fail(ErrorCode::InvalidArgument, std::string("bad level in ECA branch field ") + key);
    return *l;
  };
  b.risk = level("risk");
  b.cost = level("cost");
  if (j.contains("delta_cs_pct") && !j.at("delta_cs_pct").is_null()) {
    b.delta_cs_pct = j.at("delta_cs_pct").get<double>();
  }
  return b;
}

}  // namespace

ThresholdEffect combine(const ThresholdEffect& a, const ThresholdEffect& b) {
  ThresholdEffect e;
  if (a.text.empty() || b.text.empty() || a.text == b.text) {
    e.text = a.text.empty() ? b.text : a.text;
  } else {
    e.text = a.text + "; " + b.text;
  }
  e.cpu_set = tighter(a.cpu_set, b.cpu_set, true);
  e.packets_floor = tighter(a.packets_floor, b.packets_floor, false);
  e.packets_cap = tighter(a.packets_cap, b.packets_cap, true);
  e.logins_cap = tighter(a.logins_cap, b.logins_cap, true);
  e.clear_tamper = a.clear_tamper || b.clear_tamper;
  return e;
}

std::optional<double> AdaptationCatalogEntry::delta_for(Category c) const {
  auto it = delta_cs.find(c);
  if (it == delta_cs.end()) return std::nullopt;
  return it->second;
}

bool EcaRule::matches(Category a, std::string_view key) const {
  if (a != anomaly) return false;
  const auto k = lowercase(key);
  return !k.empty() && lowercase(scenario).find(k) != std::string::npos;
}

Catalog Catalog::parse(std::string_view text) {
  Catalog cat;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("catalog is not valid JSON: ") + e.what());
  }
  try {
    cat.unmeasured_impact_ = doc.value("unmeasured_impact", 0.05);
    cat.rat_per_user_ = doc.value("rat_per_user_s", 0.1);
    cat.active_users_ = doc.value("active_users", 10);

    // Simple entries first so combinations can refer to them.
    const auto& list = doc.at("adaptations");
    for (const auto& j : list) {
      if (j.contains("parts")) continue;
      AdaptationCatalogEntry e;
      e.name = j.at("name").get<std::string>();
      e.description = j.value("description", "");
      e.anomaly_issue = category_field(j, "anomaly_issue");
      e.specific_category = j.value("specific_category", "");
      e.cost_per_hour = j.at("cost_per_hour").get<double>();
      const auto& rat = j.at("r_at_s");
      if (rat.is_number()) e.r_at = rat.get<double>();
      else if (!(rat.is_string() && rat.get<std::string>() == "varies")) {
        fail(ErrorCode::InvalidArgument, "r_at_s of " + e.name + " must be a number or \"varies\"");
      }
      for (const auto& [k, v] : j.at("delta_cs").items()) {
        e.delta_cs[category_from_string(k)] = v.get<double>();
      }
      e.threshold_effect = parse_effect(j.value("threshold_effect", json()));
      cat.entries_.push_back(std::move(e));
    }
    for (const auto& j : list) {
      if (!j.contains("parts")) continue;
      AdaptationCatalogEntry e;
      e.name = j.at("name").get<std::string>();
      e.anomaly_issue = category_field(j, "anomaly_issue");
      e.parts = j.at("parts").get<std::vector<std::string>>();
      if (e.parts.size() < 2) fail(ErrorCode::InvalidArgument, e.name + " needs two or more parts");
      std::vector<std::string> names;
      e.r_at = 0.0;
      for (const auto& p : e.parts) {
        const auto& part = cat.at(p);
        if (part.is_combination()) fail(ErrorCode::InvalidArgument, "nested combination " + e.name);
        names.push_back(part.description);
        e.cost_per_hour += part.cost_per_hour;
        if (!part.r_at) e.r_at.reset();
        else if (e.r_at) e.r_at = std::max(*e.r_at, *part.r_at);
        e.threshold_effect = combine(e.threshold_effect, part.threshold_effect);
      }
      e.description = j.value("description", "");
      if (e.description.empty()) {
        for (std::size_t i = 0; i < names.size(); ++i) e.description += (i ? " + " : "") + names[i];
      }
      for (const auto& [k, v] : j.at("delta_cs").items()) {
        e.delta_cs[category_from_string(k)] = v.get<double>();
      }
      cat.entries_.push_back(std::move(e));
    }
    // Keep file order for reporting.
    std::vector<AdaptationCatalogEntry> ordered;
    for (const auto& j : list) ordered.push_back(cat.at(j.at("name").get<std::string>()));
    cat.entries_ = std::move(ordered);

    for (const auto& [k, v] : doc.at("decision_units").items()) {
      cat.candidates_[category_from_string(k)] = v.get<std::vector<std::string>>();
    }
    for (const auto& j : doc.value("eca_rules", json::array())) {
      EcaRule r;
      r.anomaly = category_field(j, "anomaly");
      r.scenario = j.at("scenario").get<std::string>();
      r.then_branch = parse_branch(j.at("then"));
      if (j.contains("else") && !j.at("else").is_null()) r.else_branch = parse_branch(j.at("else"));
      cat.rules_.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed catalog: ") + e.what());
  }
  cat.check();
  return cat;
}

void Catalog::check() const {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    require(!e.name.empty(), "catalog entry without a name");
    require(seen.insert(e.name).second, "duplicate catalog entry " + e.name);
    require(e.cost_per_hour >= 0, e.name + ": cost_per_hour must be >= 0");
    if (e.r_at) require(*e.r_at >= 0, e.name + ": r_at_s must be >= 0");
    for (const auto& [c, d] : e.delta_cs) {
      require(d >= 0 && d <= 1, e.name + ": delta_cs must lie in [0, 1]");
    }
  }
  require(unmeasured_impact_ >= 0 && unmeasured_impact_ <= 1, "unmeasured_impact must lie in [0, 1]");
  require(rat_per_user_ >= 0, "rat_per_user_s must be >= 0");
  require(active_users_ >= 0, "active_users must be >= 0");
  for (const auto& [c, names] : candidates_) {
    std::set<std::string> unit;
    for (const auto& n : names) {
      at(n);
      require(unit.insert(n).second, "duplicate candidate " + n);
    }
  }
  for (const auto& r : rules_) {
    at(r.then_branch.adaptation);
    if (r.else_branch) at(r.else_branch->adaptation);
  }
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "cannot open catalog " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Catalog& Catalog::defaults() {
  static const Catalog cat = parse(kDefaultCatalogJson);
  return cat;
}

const AdaptationCatalogEntry* Catalog::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const AdaptationCatalogEntry& Catalog::at(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  fail(ErrorCode::NotFound, "adaptation '" + std::string(name) + "' is not in the catalog");
}

const std::vector<std::string>& Catalog::candidates_for(Category c) const {
  auto it = candidates_.find(c);
  if (it == candidates_.end() || it->second.empty()) {
    fail(ErrorCode::UnknownAnomalyType,
         "no adaptation catalog entry for anomaly type " + std::string(to_string(c)));
  }
  return it->second;
}

double Catalog::resolved_rat(const AdaptationCatalogEntry& e) const {
  if (e.r_at) return *e.r_at;
  return rat_per_user_ * static_cast<double>(active_users_);
}

double Catalog::default_impact(std::string_view name, Category c) const {
  return at(name).delta_for(c).value_or(unmeasured_impact_);
}

void Catalog::set_active_users(int users) {
  require(users >= 0, "active user count must be >= 0");
  active_users_ = users;
}

}  // namespace qsa::control
