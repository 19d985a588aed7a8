#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segbench/aggregate.hpp"
#include "segbench/kv_file.hpp"
#include "segbench/ranking.hpp"

namespace segbench {

// Settings shared by every command. Loaded from a key-value file:
//
//   [run]        out_dir, jobs
//   [paths]      ground_truth, label_map, inventory, scores, reference
//   [models]     <model_id> = <prediction directory>   (ranking order)
//   [fusion]     patch_size, overlap, sigma_coeff
//   [evaluate]   tau_mm, case_aggregation (case_mean|pooled), min_labels,
//                split (train|val|test|all), remap_truth, remap_predictions
//   [ranking]    scopes (comma-separated)
//   [directions] <metric_id> = higher | lower   (extends the defaults)
//   [stats]      enabled, alpha
//
// Relative paths resolve against the directory of the config file.
// Command-line flags override config values, which override defaults.
struct RunConfig {
  std::filesystem::path out_dir = "segbench_out";
  std::size_t jobs = 1;

  std::optional<std::filesystem::path> ground_truth_dir;
  std::optional<std::filesystem::path> label_map;
  std::optional<std::filesystem::path> inventory;
  std::optional<std::filesystem::path> scores_dir;
  std::optional<std::filesystem::path> reference_dir;
  std::vector<std::pair<std::string, std::filesystem::path>> models;

  std::size_t patch_size = 96;
  double overlap = 0.5;
  double sigma_coeff = 0.125;

  double tau_mm = 3.0;
  CaseAggregation case_aggregation = CaseAggregation::case_mean;
  std::size_t min_labels = 23;
  std::string split = "test";
  bool remap_truth = false;
  bool remap_predictions = false;

  std::vector<std::string> scopes{"btcv", "surgical", "total"};
  DirectionRegistry directions;

  bool stats_enabled = true;
  double alpha = 0.05;

  // Throws ArgumentError for unknown sections/keys or out-of-range values.
  static RunConfig from_tree(const KvTree& tree, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  // Range checks on the numeric fields; ArgumentError on violation.
  void validate() const;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace segbench
