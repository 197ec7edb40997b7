#include "qsadapt/types.hpp"

#include "qsadapt/errors.hpp"

namespace qsa {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EmptyQueue: return "empty-queue";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::UnknownAnomalyType: return "unknown-anomaly-type";
    case ErrorCode::NoCandidates: return "no-candidates";
    case ErrorCode::UnknownEffect: return "unknown-effect";
    case ErrorCode::NoRecommendation: return "no-recommendation";
    case ErrorCode::InvalidRecord: return "invalid-record";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::NothingToMeasure: return "nothing-to-measure";
  }
  return "unknown";
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::QoA: return "QoA";
    case Category::QoS: return "QoS";
    case Category::SecurityDoS: return "SecurityDoS";
    case Category::Intrusion: return "Intrusion";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view s) {
  if (s == "QoA") return Category::QoA;
  if (s == "QoS") return Category::QoS;
  if (s == "SecurityDoS" || s == "DoS") return Category::SecurityDoS;
  if (s == "Intrusion" || s == "UA") return Category::Intrusion;
  return std::nullopt;
}

Category category_from_string(std::string_view s) {
  if (auto c = parse_category(s)) return *c;
  fail(ErrorCode::UnknownAnomalyType, "unknown anomaly category '" + std::string(s) + "'");
}

std::string_view to_string(Level l) {
  switch (l) {
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: return "High";
  }
  return "?";
}

std::string_view to_letter(Level l) {
  switch (l) {
    case Level::Low: return "L";
    case Level::Medium: return "M";
    case Level::High: return "H";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view s) {
  if (s == "L" || s == "Low") return Level::Low;
  if (s == "M" || s == "Medium") return Level::Medium;
  if (s == "H" || s == "High") return Level::High;
  return std::nullopt;
}

}  // namespace qsa
