#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "segbench/config.hpp"
#include "segbench/ranking.hpp"

namespace segbench {

// Each command reads its inputs, writes its outputs under config.out_dir
// and reports warnings to `log`. Per-case work runs on config.jobs threads;
// results are collected by case index, so outputs do not depend on it.

// <scores>/<case>.vsbp fused onto the grid of <reference>/<case>.nii[.gz],
// written to <out>/fused/<case>.nii.gz. Returns the written paths.
std::vector<std::filesystem::path> cmd_fuse(const RunConfig& config, std::ostream& log);

// Per-model predictions against ground truth. Writes metrics.csv,
// aggregates.csv, metric_table.csv and observations_{dice,nsd}.csv.
void cmd_evaluate(const RunConfig& config, std::ostream& log);

struct RankOptions {
  std::optional<std::filesystem::path> metric_table;  // default <out>/metric_table.csv
  std::vector<std::filesystem::path> manifests;
  std::optional<std::filesystem::path> complexity_csv;
  // Case-based scheme from a metrics.csv (needs the label map).
  std::optional<std::filesystem::path> per_case_metrics;
};

// Writes ranking.csv and ranking.txt (and ranking_per_case.csv).
RankingResult cmd_rank(const RunConfig& config, const RankOptions& options, std::ostream& log);

struct StatsOptions {
  // Default: <out>/observations_dice.csv and observations_nsd.csv.
  std::vector<std::filesystem::path> observations;
};

// anova_<name>.csv and tukey_<name>.csv per observation file, where name
// is the file stem without an `observations_` prefix.
void cmd_stats(const RunConfig& config, const StatsOptions& options, std::ostream& log);

struct ComplexityOptions {
  std::vector<std::filesystem::path> manifests;
  std::optional<std::string> time_command;
  std::size_t runs = 1000;
  std::size_t warmup = 10;
  std::string model_id;
  std::optional<double> params_millions;
};

// complexity.csv from manifests; with a time command, also records
// latency_<model>.txt and manifest_<model>.ini first.
void cmd_complexity(const RunConfig& config, const ComplexityOptions& options, std::ostream& log);

struct ReportOptions {
  std::optional<std::filesystem::path> bundle;  // default: out_dir
};

// report.txt from ranking.csv (+ aggregates.csv, complexity.csv) and, when
// metrics.csv is present, boxplot.csv. Returns the rendered report.
std::string cmd_report(const RunConfig& config, const ReportOptions& options, std::ostream& log);

}  // namespace segbench
