#include "qsadapt/knowledge_base.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "qsadapt/errors.hpp"

namespace qsa::kb {

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::AnomalyDetected: return "AnomalyDetected";
    case RecordKind::DecisionMade: return "DecisionMade";
    case RecordKind::AdaptationEnacted: return "AdaptationEnacted";
    case RecordKind::FeedbackMeasured: return "FeedbackMeasured";
  }
  return "?";
}

std::optional<RecordKind> parse_record_kind(std::string_view s) {
  for (auto k : {RecordKind::AnomalyDetected, RecordKind::DecisionMade,
                 RecordKind::AdaptationEnacted, RecordKind::FeedbackMeasured}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string format_number(double x) { return fmt::format("{:.9g}", x); }

double canonical(double x) { return std::stod(format_number(x)); }

namespace {

// Field presence per kind.
enum Field : unsigned {
  kCategory = 1u << 0,
  kSeverity = 1u << 1,
  kAdaptation = 1u << 2,
  kCt = 1u << 3,
  kImpact = 1u << 4,
  kRat = 1u << 5,
  kCost = 1u << 6,
  kRisk = 1u << 7,
  kOutcome = 1u << 8,
};

struct FieldRule {
  unsigned required;
  unsigned allowed;
};

FieldRule rule_for(RecordKind k) {
  switch (k) {
    case RecordKind::AnomalyDetected:
      return {kCategory | kSeverity, kCategory | kSeverity | kOutcome};
    case RecordKind::DecisionMade:
      return {kCategory | kAdaptation | kCt,
              kCategory | kAdaptation | kCt | kImpact | kRat | kCost | kRisk};
    case RecordKind::AdaptationEnacted:
      return {kCategory | kAdaptation | kRat | kCost,
              kCategory | kSeverity | kAdaptation | kRat | kCost | kRisk | kOutcome};
    case RecordKind::FeedbackMeasured:
      return {kCategory | kAdaptation | kImpact, kCategory | kAdaptation | kImpact | kOutcome};
  }
  return {0, 0};
}

unsigned present(const KbRecord& r) {
  unsigned m = 0;
  if (r.category) m |= kCategory;
  if (r.severity_ms) m |= kSeverity;
  if (r.adaptation) m |= kAdaptation;
  if (r.ct) m |= kCt;
  if (r.impact_i) m |= kImpact;
  if (r.rat_s) m |= kRat;
  if (r.cost_per_hr) m |= kCost;
  if (r.risk_rf) m |= kRisk;
  if (r.outcome_latency_ms) m |= kOutcome;
  return m;
}

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::InvalidRecord, what); }

void check_text(std::string_view field, std::string_view s) {
  if (s.find_first_of(",\"\r\n") != std::string_view::npos) {
    invalid(std::string(field) + " must not contain commas, quotes or line breaks");
  }
}

void normalise(KbRecord& r) {
  r.timestamp = canonical(r.timestamp);
  for (auto* f : {&r.severity_ms, &r.impact_i, &r.rat_s, &r.cost_per_hr, &r.risk_rf,
                  &r.outcome_latency_ms}) {
    if (*f) **f = canonical(**f);
  }
}

}  // namespace

void validate(const KbRecord& r) {
  if (r.session_id.empty()) invalid("session_id is required");
  check_text("session_id", r.session_id);
  if (!std::isfinite(r.timestamp) || r.timestamp < 0) invalid("timestamp must be finite and >= 0");

  const auto rule = rule_for(r.kind);
  const unsigned have = present(r);
  if ((have & rule.required) != rule.required) {
    invalid(std::string(to_string(r.kind)) + " record is missing a required field");
  }
  if ((have & ~rule.allowed) != 0) {
    invalid(std::string(to_string(r.kind)) + " record carries a field that must be empty");
  }
  if (r.adaptation) {
    if (r.adaptation->empty()) invalid("adaptation name must not be empty");
    check_text("adaptation", *r.adaptation);
  }
  auto non_negative = [](const std::optional<double>& v, const char* name) {
    if (v && !(std::isfinite(*v) && *v >= 0)) invalid(std::string(name) + " must be >= 0");
  };
  auto unit = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 0 && *v <= 1)) invalid(std::string(name) + " must lie in [0, 1]");
  };
  non_negative(r.severity_ms, "severity_ms");
  non_negative(r.rat_s, "rat_s");
  non_negative(r.cost_per_hr, "cost_per_hr");
  non_negative(r.outcome_latency_ms, "outcome_latency_ms");
  unit(r.impact_i, "impact_i");
  unit(r.risk_rf, "risk_rf");
  if (r.ct && *r.ct < 0) invalid("ct must be >= 0");
}

std::string to_csv_row(const KbRecord& r) {
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string out;
  out.reserve(128);
  out += std::to_string(r.record_id);
  out += ',';
  out += r.session_id;
  out += ',';
  out += format_number(r.timestamp);
  out += ',';
  out += to_string(r.kind);
  out += ',';
  if (r.category) out += to_string(*r.category);
  out += ',';
  out += num(r.severity_ms);
  out += ',';
  if (r.adaptation) out += *r.adaptation;
  out += ',';
  if (r.ct) out += std::to_string(*r.ct);
  for (const auto* v : {&r.impact_i, &r.rat_s, &r.cost_per_hr, &r.risk_rf, &r.outcome_latency_ms}) {
    out += ',';
    out += num(*v);
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view row) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    const auto comma = row.find(',', start);
    if (comma == std::string_view::npos) {
      cols.push_back(row.substr(start));
      return cols;
    }
    cols.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(std::string_view s, std::size_t line, const char* name) {
  // from_chars for double is missing from some standard libraries we target.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("bad number in ") + name + ": '" + tmp + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::size_t line, const char* name) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, std::string("bad integer in ") + name + ": '" + std::string(s) + "'");
  }
  return v;
}

std::optional<double> opt_double(std::string_view s, std::size_t line, const char* name) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line, name);
}

}  // namespace

KbRecord parse_csv_row(std::string_view row, std::size_t line) {
  if (!row.empty() && row.back() == '\r') throw ParseError(line, "CRLF line endings are not accepted");
  const auto c = split(row);
  if (c.size() != 13) {
    throw ParseError(line, "expected 13 columns, found " + std::to_string(c.size()));
  }
  KbRecord r;
  r.record_id = parse_int<std::uint64_t>(c[0], line, "record_id");
  r.session_id = std::string(c[1]);
  r.timestamp = parse_double(c[2], line, "timestamp_s");
  const auto kind = parse_record_kind(c[3]);
  if (!kind) throw ParseError(line, "unknown record_kind '" + std::string(c[3]) + "'");
  r.kind = *kind;
  if (!c[4].empty()) {
    r.category = parse_category(c[4]);
    if (!r.category) throw ParseError(line, "unknown anomaly_category '" + std::string(c[4]) + "'");
  }
  r.severity_ms = opt_double(c[5], line, "severity_ms");
  if (!c[6].empty()) r.adaptation = std::string(c[6]);
  if (!c[7].empty()) r.ct = parse_int<std::int64_t>(c[7], line, "ct");
  r.impact_i = opt_double(c[8], line, "impact_i");
  r.rat_s = opt_double(c[9], line, "rat_s");
  r.cost_per_hr = opt_double(c[10], line, "cost_per_hr");
  r.risk_rf = opt_double(c[11], line, "risk_rf");
  r.outcome_latency_ms = opt_double(c[12], line, "outcome_latency_ms");
  try {
    validate(r);
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  return r;
}

std::vector<KbRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (line != kCsvHeader) throw ParseError(1, "unexpected header");

  std::vector<KbRecord> out;
  std::map<std::string, double, std::less<>> last_ts;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) throw ParseError(n, "empty row");
    KbRecord r = parse_csv_row(line, n);
    if (!out.empty() && r.record_id <= out.back().record_id) {
      throw ParseError(n, "record_id must increase");
    }
    auto [it, fresh] = last_ts.try_emplace(r.session_id, r.timestamp);
    if (!fresh) {
      if (r.timestamp < it->second) throw ParseError(n, "timestamp decreases within session");
      it->second = r.timestamp;
    }
    out.push_back(std::move(r));
  }
  return out;
}

KnowledgeBase KnowledgeBase::open(const std::filesystem::path& path) {
  KnowledgeBase kb;
  if (std::filesystem::exists(path)) {
    kb.records_ = read_csv(path);
  } else {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::NotFound, "cannot create " + path.string());
    out << kCsvHeader << '\n';
  }
  kb.path_ = path;
  return kb;
}

bool KnowledgeBase::has_session(std::string_view session_id) const {
  for (const auto& r : records_) {
    if (r.session_id == session_id) return true;
  }
  return false;
}

void KnowledgeBase::check_against_store(const KbRecord& r) const {
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->session_id == r.session_id) {
      if (r.timestamp < it->timestamp) {
        invalid("timestamp " + format_number(r.timestamp) + " precedes session's last record at " +
                format_number(it->timestamp));
      }
      break;
    }
  }
}

void KnowledgeBase::write_through(const KbRecord& r) {
  if (!path_) return;
  std::ofstream out(*path_, std::ios::binary | std::ios::app);
  out << to_csv_row(r) << '\n';
  out.flush();
  if (!out) fail(ErrorCode::InvalidRecord, "failed to persist record to " + path_->string());
}

std::uint64_t KnowledgeBase::append(KbRecord record) {
  validate(record);
  normalise(record);
  check_against_store(record);
  record.record_id = records_.empty() ? 1 : records_.back().record_id + 1;
  write_through(record);
  records_.push_back(std::move(record));
  return records_.back().record_id;
}

std::vector<AdaptationHistory> KnowledgeBase::history(Category category, double alpha) const {
  require(alpha > 0 && alpha <= 1, "EMA weight must lie in (0, 1]");
  struct Acc {
    std::int64_t ct = 0;
    std::optional<double> ema;
    std::optional<double> decided_i;
  };
  std::map<std::string, Acc> acc;
  for (const auto& r : records_) {
    if (r.category != category || !r.adaptation) continue;
    if (r.kind == RecordKind::DecisionMade) {
      auto& a = acc[*r.adaptation];
      a.ct = *r.ct;
      if (r.impact_i) a.decided_i = r.impact_i;
    } else if (r.kind == RecordKind::FeedbackMeasured) {
      auto& a = acc[*r.adaptation];
      a.ema = a.ema ? alpha * *r.impact_i + (1.0 - alpha) * *a.ema : *r.impact_i;
    }
  }
  std::vector<AdaptationHistory> out;
  out.reserve(acc.size());
  for (auto& [name, a] : acc) {
    out.push_back({name, a.ct, a.ema ? a.ema : a.decided_i});
  }
  return out;
}

std::size_t KnowledgeBase::export_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : records_) out << to_csv_row(r) << '\n';
  return records_.size();
}

std::size_t KnowledgeBase::import_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  // Dry run first so a bad row leaves the store untouched.
  KnowledgeBase trial;
  trial.records_ = records_;
  std::size_t line = 1;
  for (const auto& r : rows) {
    ++line;
    try {
      trial.append(r);
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
  }
  for (auto& r : rows) append(std::move(r));
  return rows.size();
}

}  // namespace qsa::kb
