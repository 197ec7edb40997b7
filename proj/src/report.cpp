#include "qsadapt/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "qsadapt/errors.hpp"
#include "qsadapt/queue_analytics.hpp"

namespace qsa::report {

namespace {

using Row = std::vector<std::string>;

// Left-aligned columns separated by two spaces, header underlined.
std::string table(const Row& header, const std::vector<Row>& rows) {
  std::vector<std::size_t> w(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) w[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
  }
  std::string out;
  auto line = [&](const Row& r) {
    std::string l;
    for (std::size_t c = 0; c < r.size(); ++c) {
      l += r[c];
      if (c + 1 < r.size()) l += std::string(w[c] - r[c].size() + 2, ' ');
    }
    out += l + "\n";
  };
  line(header);
  Row rule;
  for (auto x : w) rule.push_back(std::string(x, '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return out;
}

std::string csv(const Row& header, const std::vector<Row>& rows) {
  auto join = [](const Row& r) {
    std::string l;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) l += ',';
      l += r[c];
    }
    return l + "\n";
  };
  std::string out = join(header);
  for (const auto& r : rows) out += join(r);
  return out;
}

std::string f(double x, int prec = 4) { return fmt::format("{:.{}f}", x, prec); }
std::string pct(double fraction) { return fmt::format("{:.2f}", 100.0 * fraction); }
std::string opt_pct(const std::optional<double>& x) { return x ? pct(*x) : "-"; }

std::string letter(Level l) { return std::string(to_letter(l)); }

std::string candidates(const pipeline::LedgerRow& row, bool for_csv) {
  std::string out;
  for (const auto& t : row.candidates) {
    if (!out.empty()) out += for_csv ? "|" : " > ";
    out += for_csv ? fmt::format("{}:{}:{:.4f}", t.an, t.ct, t.i)
                   : fmt::format("{}(ct={} i={:.4f})", t.an, t.ct, t.i);
  }
  return out;
}

Row queue_header() {
  return {"source", "horizon_s", "events_in_queue", "wq_s",      "wq_served_s", "x_bar_s",
          "rtq_s",  "rat_s",     "rs_s",            "processed", "severe",      "rejected"};
}

std::vector<Row> queue_rows(const pipeline::RunResult& r) {
  std::vector<Row> rows;
  // Wq = Lq / λ, RTq = Wq + X̄, Rs = RTq + Rat.
  auto add = [&](const std::string& src, double horizon, const queue::SimStats& s, double rat) {
    const double rtq = queue::response_time_in_queue(s.wq_from_queue_length, s.mean_x_bar_empirical);
    rows.push_back({src, f(horizon, 1), f(s.mean_lq), f(s.wq_from_queue_length), f(s.mean_wq),
                    f(s.mean_x_bar_empirical), f(rtq), f(rat), f(queue::system_response(rtq, rat)),
                    std::to_string(s.processed_total), std::to_string(s.processed_severe),
                    std::to_string(s.rejected)});
  };
  add("session", r.duration, r.queue_stats, r.mean_rat);
  for (const auto& t : r.trend) add("trend", t.horizon, t.stats, t.stats.mean_rs - t.stats.mean_rtq);
  return rows;
}

Row ledger_header() {
  return {"event",     "anomaly",     "adaptation", "category",    "decided_s",  "effective_s",
          "rat_s",     "cost_per_hr", "cost_level", "effect",      "catalog_pct", "measured_pct",
          "stream_pct", "ld",         "impact",     "rf",          "risk_level", "ct",
          "cost_usd",  "forced",      "candidates", "note"};
}

std::vector<Row> ledger_rows(const pipeline::RunResult& r, bool for_csv) {
  std::vector<Row> rows;
  for (const auto& l : r.ledger) {
    rows.push_back({std::to_string(l.event_id),
                    std::string(to_string(l.anomaly)),
                    l.adaptation,
                    l.specific_category.empty() ? "-" : l.specific_category,
                    f(l.decided_at, 3),
                    f(l.effective_at, 3),
                    f(l.r_at, 2),
                    f(l.cost_per_hour, 2),
                    letter(l.cost_level),
                    l.threshold_effect.empty() ? "-" : l.threshold_effect,
                    opt_pct(l.catalog_delta_cs),
                    opt_pct(l.measured_impact),
                    opt_pct(l.stream_reduction),
                    f(l.risk.likelihood),
                    f(l.risk.impact),
                    f(l.risk.failure_risk),
                    letter(l.risk.bucket),
                    std::to_string(l.ct),
                    f(l.cost_accrued, 6),
                    l.overridden ? "yes" : "no",
                    candidates(l, for_csv),
                    l.failed ? "failed: no known effect" : "-"});
  }
  return rows;
}

Row rec_header() {
  return {"anomaly", "scenario",  "then",      "then_risk", "then_cost", "then_pct", "then_rf",
          "then_rf_level", "else", "else_risk", "else_cost", "else_pct",  "else_rf",  "else_rf_level",
          "chosen"};
}

std::vector<Row> rec_rows(const pipeline::RunResult& r) {
  std::vector<Row> rows;
  auto pct_text = [](const std::optional<double>& p) { return p ? f(*p, 2) : std::string("-"); };
  for (const auto& rec : r.recommendations) {
    const auto& t = rec.rule.then_branch;
    Row row{std::string(to_string(rec.rule.anomaly)), rec.rule.scenario, t.adaptation,
            letter(t.risk), letter(t.cost), pct_text(t.delta_cs_pct), f(rec.then_risk.failure_risk),
            letter(rec.then_risk.bucket)};
    if (rec.rule.else_branch) {
      const auto& e = *rec.rule.else_branch;
      row.insert(row.end(), {e.adaptation, letter(e.risk), letter(e.cost), pct_text(e.delta_cs_pct),
                             f(rec.else_risk->failure_risk), letter(rec.else_risk->bucket)});
    } else {
      row.insert(row.end(), {"-", "-", "-", "-", "-", "-"});
    }
    row.push_back(rec.chosen ? rec.chosen->adaptation + (rec.took_else ? " (else)" : " (then)")
                             : "none");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write report " + p.string());
  out << text;
}

}  // namespace

std::string queue_metrics_text(const pipeline::RunResult& r) {
  return "Queue metrics (times in seconds)\n\n" + table(queue_header(), queue_rows(r));
}

std::string queue_metrics_csv(const pipeline::RunResult& r) {
  return csv(queue_header(), queue_rows(r));
}

std::string ledger_text(const pipeline::RunResult& r) {
  if (r.ledger.empty()) return "Adaptation ledger\n\nno adaptations enacted\n";
  return "Adaptation ledger\n\n" + table(ledger_header(), ledger_rows(r, false));
}

std::string ledger_csv(const pipeline::RunResult& r) {
  return csv(ledger_header(), ledger_rows(r, true));
}

std::string recommendations_text(const pipeline::RunResult& r) {
  return "ECA recommendations (rule levels as catalogued; rf columns computed)\n\n" +
         table(rec_header(), rec_rows(r));
}

std::string recommendations_csv(const pipeline::RunResult& r) {
  return csv(rec_header(), rec_rows(r));
}

std::string summary_text(const pipeline::RunResult& r) {
  std::size_t covered = 0, rejected = 0, failed = 0;
  for (const auto& e : r.events) {
    if (e.outcome == pipeline::EventOutcome::AlreadyCovered) ++covered;
    if (e.outcome == pipeline::EventOutcome::Rejected) ++rejected;
    if (e.outcome == pipeline::EventOutcome::EnactmentFailed) ++failed;
  }
  std::string out;
  out += fmt::format("session              {}\n", r.session_id);
  out += fmt::format("adaptation           {}\n", r.adaptation_enabled ? "enabled" : "disabled");
  out += fmt::format("samples              {}\n", r.raw.size());
  out += fmt::format("duration_s           {}\n", f(r.duration, 1));
  for (Category c : kAllCategories) {
    const auto it = r.detected.find(c);
    out += fmt::format("alarms_{:<14}{}\n", to_string(c), it == r.detected.end() ? 0 : it->second);
  }
  out += fmt::format("events_processed     {}\n", r.queue_stats.processed_total);
  out += fmt::format("events_rejected      {}\n", rejected);
  out += fmt::format("events_covered       {}\n", covered);
  out += fmt::format("adaptations          {}\n", r.ledger.size() - failed);
  out += fmt::format("enactments_failed    {}\n", failed);
  out += fmt::format("accrued_cost_usd     {}\n", f(r.accrued_cost, 6));
  out += fmt::format("excess_unmitigated   {}\n", f(r.raw_excess_total, 3));
  out += fmt::format("excess_observed      {}\n", f(r.observed_excess_total, 3));
  const double red =
      r.raw_excess_total > 0 ? 1.0 - r.observed_excess_total / r.raw_excess_total : 0.0;
  out += fmt::format("excess_reduction_pct {}\n", pct(red));
  out += fmt::format("mean_wq_s            {}\n", f(r.queue_stats.mean_wq, 6));
  out += fmt::format("mean_rs_s            {}\n", f(r.queue_stats.mean_rs, 6));
  return out;
}

std::vector<std::filesystem::path> write_all(const pipeline::RunResult& r,
                                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> files = {
      {"summary.txt", summary_text(r)},
      {"queue_metrics.txt", queue_metrics_text(r)},
      {"queue_metrics.csv", queue_metrics_csv(r)},
      {"adaptation_ledger.txt", ledger_text(r)},
      {"adaptation_ledger.csv", ledger_csv(r)},
      {"recommendations.txt", recommendations_text(r)},
      {"recommendations.csv", recommendations_csv(r)},
  };
  std::vector<std::filesystem::path> out;
  for (const auto& [name, text] : files) {
    write_file(dir / name, text);
    out.push_back(dir / name);
  }
  return out;
}

}  // namespace qsa::report
