#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "topicprobe/runner.hpp"
#include "topicprobe/sensitivity.hpp"

namespace topicprobe {

struct ReportInput {
  std::span<const SweepResult> sweeps;
  std::span<const TopicModelRun> models;
  const SensitivityReport* sensitivity = nullptr;
};

// Writes into out_dir (created if missing):
//   scores.csv       one ScoreRecord per row (when sweeps are given)
//   summary.csv      seen/unseen/difference per embedding
//   skips.csv        skipped test folds with their reasons
//   sensitivity.csv  per-task measures plus a correlation footer
//   report.md        markdown tables of the above
// Throws RuntimeFailure when the directory cannot be written.
void emit_report(const ReportInput& input, const std::filesystem::path& out_dir);

}  // namespace topicprobe
