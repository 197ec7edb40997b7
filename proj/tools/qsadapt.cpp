// qsadapt: scenario runner, queue analytics and knowledge-base maintenance.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qsadapt/catalog.hpp"
#include "qsadapt/config.hpp"
#include "qsadapt/errors.hpp"
#include "qsadapt/knowledge_base.hpp"
#include "qsadapt/pipeline.hpp"
#include "qsadapt/queue_analytics.hpp"
#include "qsadapt/report.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr const char* kKbEnv = "QSADAPT_KB";

std::string kb_path_or_env(const std::string& flag, const std::string& fallback) {
  if (const char* env = std::getenv(kKbEnv); env && *env) return env;
  return flag.empty() ? fallback : flag;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, bool no_adaptation,
            std::optional<double> severe, const std::string& kb_flag,
            const std::string& report_flag) {
  auto cfg = qsa::config::load(config_path);
  if (seed) cfg.seed = *seed;
  if (no_adaptation) cfg.adaptation_enabled = false;
  if (severe) cfg.severe_threshold_ms = *severe;
  if (!report_flag.empty()) cfg.report_dir = report_flag;
  cfg.kb_path = kb_path_or_env(kb_flag, cfg.kb_path.string());
  qsa::config::validate(cfg);

  const auto catalog =
      cfg.catalog_path ? qsa::control::Catalog::load(*cfg.catalog_path) : qsa::control::Catalog::defaults();
  auto kb = qsa::kb::KnowledgeBase::open(cfg.kb_path);
  const auto result = qsa::pipeline::run(cfg, catalog, kb);
  const auto files = qsa::report::write_all(result, cfg.report_dir);

  std::cout << qsa::report::summary_text(result);
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

int cmd_analyze(double lambda, double mu1, double mu2, double mu3, std::size_t k) {
  const qsa::queue::StageRates rates{mu1, mu2, mu3};
  const double x_bar = qsa::queue::mean_service_time(rates);
  const auto m = qsa::queue::mm1k_analytics(lambda, 1.0 / x_bar, k);

  fmt::print("lambda       {:.6g}\n", lambda);
  fmt::print("x_bar        {:.6g}\n", x_bar);
  fmt::print("mu_eff       {:.6g}\n", 1.0 / x_bar);
  fmt::print("rho          {:.6g}\n", m.rho);
  fmt::print("K            {}\n\n", k);
  fmt::print("{:>4}  {:>14}\n", "n", "P(n)");
  for (std::size_t n = 0; n < m.state_probs.size(); ++n) {
    fmt::print("{:>4}  {:>14.8f}\n", n, m.state_probs[n]);
  }
  fmt::print("\n");
  fmt::print("blocking     {:.8g}\n", m.blocking_prob);
  fmt::print("lambda_eff   {:.8g}\n", m.effective_lambda);
  fmt::print("utilization  {:.8g}\n", m.utilization);
  fmt::print("L            {:.8g}\n", m.L);
  fmt::print("Lq           {:.8g}\n", m.Lq);
  fmt::print("W            {:.8g}\n", m.W);
  fmt::print("Wq           {:.8g}\n", m.Wq);
  fmt::print("RTq          {:.8g}\n", qsa::queue::response_time_in_queue(m.Wq, x_bar));
  return 0;
}

int cmd_kb_export(const std::string& kb_path, const std::string& out) {
  auto kb = qsa::kb::KnowledgeBase::open(kb_path);
  const auto n = kb.export_csv(out);
  std::cout << "exported " << n << " records to " << out << "\n";
  return 0;
}

int cmd_kb_import(const std::string& kb_path, const std::string& in) {
  auto kb = qsa::kb::KnowledgeBase::open(kb_path);
  const auto n = kb.import_csv(in);
  std::cout << "imported " << n << " records into " << kb_path << "\n";
  return 0;
}

int cmd_kb_history(const std::string& kb_path, const std::string& category, double alpha) {
  const auto cat = qsa::category_from_string(category);
  auto kb = qsa::kb::KnowledgeBase::open(kb_path);
  fmt::print("{:<10}  {:>6}  {:>10}\n", "adaptation", "ct", "i");
  for (const auto& h : kb.history(cat, alpha)) {
    fmt::print("{:<10}  {:>6}  {:>10}\n", h.adaptation, h.ct,
               h.impact_i ? fmt::format("{:.6f}", *h.impact_i) : std::string("-"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queueing-driven anomaly adaptation for networked VR sessions"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario config end to end and write reports");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool no_adaptation = false;
  std::optional<double> severe;
  std::string run_kb, report_dir;
  run->add_option("config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the telemetry seed");
  run->add_flag("--no-adaptation", no_adaptation, "Detect and queue but never adapt (NA run)");
  run->add_option("--severe-threshold", severe, "Severity (ms) above which an event counts as severe")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--kb", run_kb, "Knowledge-base CSV (env " + std::string(kKbEnv) + " wins)");
  run->add_option("--report-dir", report_dir, "Directory for report files");

  auto* analyze = app.add_subcommand("analyze", "Print M/M/1/K analytics for three service stages");
  double lambda = 0, mu1 = 0, mu2 = 0, mu3 = 0;
  std::size_t k = 0;
  analyze->add_option("lambda", lambda, "Arrival rate")->required()->check(CLI::PositiveNumber);
  analyze->add_option("mu1", mu1, "Stage 1 rate")->required()->check(CLI::PositiveNumber);
  analyze->add_option("mu2", mu2, "Stage 2 rate")->required()->check(CLI::PositiveNumber);
  analyze->add_option("mu3", mu3, "Stage 3 rate")->required()->check(CLI::PositiveNumber);
  analyze->add_option("K", k, "System capacity")->required()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));

  auto* kbcmd = app.add_subcommand("kb", "Knowledge-base maintenance");
  kbcmd->require_subcommand(1);
  std::string kb_flag;
  kbcmd->add_option("--kb", kb_flag, "Knowledge-base CSV (env " + std::string(kKbEnv) + " wins)");
  std::string export_path, import_path, hist_cat;
  double alpha = 0.5;
  auto* kexport = kbcmd->add_subcommand("export", "Write the store as CSV");
  kexport->add_option("file", export_path)->required();
  auto* kimport = kbcmd->add_subcommand("import", "Append every row of a CSV file, or none");
  kimport->add_option("file", import_path)->required()->check(CLI::ExistingFile);
  auto* khist = kbcmd->add_subcommand("history", "Per-adaptation usage count and impact");
  khist->add_option("category", hist_cat, "QoA, QoS, SecurityDoS or Intrusion")->required();
  khist->add_option("--alpha", alpha, "EMA weight of the newest feedback")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, no_adaptation, severe, run_kb, report_dir);
    if (*analyze) return cmd_analyze(lambda, mu1, mu2, mu3, k);
    const auto kb_path = kb_path_or_env(kb_flag, "kb.csv");
    if (*kexport) return cmd_kb_export(kb_path, export_path);
    if (*kimport) return cmd_kb_import(kb_path, import_path);
    if (*khist) return cmd_kb_history(kb_path, hist_cat, alpha);
  } catch (const qsa::Error& e) {
    std::cerr << "error [" << qsa::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
