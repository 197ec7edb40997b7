#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsadapt/types.hpp"

namespace qsa::kb {

enum class RecordKind { AnomalyDetected, DecisionMade, AdaptationEnacted, FeedbackMeasured };

std::string_view to_string(RecordKind k);
std::optional<RecordKind> parse_record_kind(std::string_view s);

/// One knowledge-base row. Which optional fields must be present (and which
/// must stay empty) depends on `kind`; see validate().
struct KbRecord {
  std::uint64_t record_id = 0;  // assigned on append
  std::string session_id;
  double timestamp = 0.0;
  RecordKind kind = RecordKind::AnomalyDetected;
  std::optional<Category> category;
  std::optional<double> severity_ms;
  std::optional<std::string> adaptation;
  std::optional<std::int64_t> ct;
  std::optional<double> impact_i;
  std::optional<double> rat_s;
  std::optional<double> cost_per_hr;
  std::optional<double> risk_rf;
  std::optional<double> outcome_latency_ms;

  bool operator==(const KbRecord&) const = default;
};

/// Exact CSV header of the interchange format.
inline constexpr std::string_view kCsvHeader =
    "record_id,session_id,timestamp_s,record_kind,anomaly_category,severity_ms,adaptation,ct,"
    "impact_i,rat_s,cost_per_hr,risk_rf,outcome_latency_ms";

/// Field-level checks that do not depend on store state. Throws
/// Error(InvalidRecord).
void validate(const KbRecord& record);

/// Per-adaptation history for one anomaly category.
struct AdaptationHistory {
  std::string adaptation;
  std::int64_t ct = 0;
  std::optional<double> impact_i;  // EMA of measured impacts, if any
};

std::string to_csv_row(const KbRecord& record);
/// Throws ParseError carrying `line`.
KbRecord parse_csv_row(std::string_view row, std::size_t line);

/// Reads and validates a CSV file without touching any store.
std::vector<KbRecord> read_csv(const std::filesystem::path& path);

/// Append-only record store. With a backing file every append is written
/// through immediately; the file is the CSV interchange format itself.
/// Single writer; a store opened on a file sees the records present at open
/// time plus its own appends.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  static KnowledgeBase open(const std::filesystem::path& path);

  /// Validates, assigns the next id and persists. Throws Error(InvalidRecord)
  /// on a kind/field mismatch or a timestamp earlier than the session's last.
  /// Numeric fields are normalised to their 9-significant-digit form.
  std::uint64_t append(KbRecord record);

  const std::vector<KbRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool has_session(std::string_view session_id) const;

  /// Aggregates DecisionMade (latest ct) and FeedbackMeasured (EMA with
  /// weight `alpha` on the newest value) per adaptation, sorted by name.
  std::vector<AdaptationHistory> history(Category category, double alpha = 0.5) const;

  std::size_t export_csv(const std::filesystem::path& path) const;
  /// Appends every row of the file, or none if any row is rejected. Ids in
  /// the file must be strictly increasing; rows are renumbered to continue
  /// this store's sequence, so importing into an empty store keeps 1..n.
  std::size_t import_csv(const std::filesystem::path& path);

  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void check_against_store(const KbRecord& r) const;
  void write_through(const KbRecord& r);

  std::vector<KbRecord> records_;
  std::optional<std::filesystem::path> path_;
};

/// Round-trips a value through its 9-significant-digit text form.
double canonical(double x);
std::string format_number(double x);

}  // namespace qsa::kb
