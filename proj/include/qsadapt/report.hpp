#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qsadapt/pipeline.hpp"

namespace qsa::report {

std::string queue_metrics_text(const pipeline::RunResult& r);
std::string queue_metrics_csv(const pipeline::RunResult& r);
std::string ledger_text(const pipeline::RunResult& r);
std::string ledger_csv(const pipeline::RunResult& r);
std::string recommendations_text(const pipeline::RunResult& r);
std::string recommendations_csv(const pipeline::RunResult& r);
std::string summary_text(const pipeline::RunResult& r);

/// Writes every report into `dir` (created if needed) and returns the paths
/// in a fixed order. Contents depend only on the run result.
std::vector<std::filesystem::path> write_all(const pipeline::RunResult& r,
                                             const std::filesystem::path& dir);

}  // namespace qsa::report
