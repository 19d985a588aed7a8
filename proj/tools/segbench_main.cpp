#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segbench/commands.hpp"
#include "segbench/config.hpp"
#include "segbench/error.hpp"

namespace fs = std::filesystem;
using namespace segbench;

namespace {

struct CommonFlags {
  std::optional<fs::path> config;
  std::optional<fs::path> out_dir;
  std::optional<std::size_t> jobs;
};

struct SettingFlags {
  std::optional<fs::path> ground_truth, label_map, inventory, scores, reference;
  std::vector<std::string> models;
  std::optional<std::size_t> patch_size, min_labels;
  std::optional<double> overlap, sigma_coeff, tau, alpha;
  std::optional<std::string> case_aggregation, split, scopes;
  bool remap_truth = false, remap_predictions = false;
};

template <typename T>
void override(T& target, const std::optional<T>& flag) {
  if (flag) target = *flag;
}

RunConfig resolve_config(const CommonFlags& common, const SettingFlags& s) {
  RunConfig c = common.config ? RunConfig::load(*common.config) : RunConfig{};
  override(c.out_dir, common.out_dir);
  override(c.jobs, common.jobs);
  if (s.ground_truth) c.ground_truth_dir = s.ground_truth;
  if (s.label_map) c.label_map = s.label_map;
  if (s.inventory) c.inventory = s.inventory;
  if (s.scores) c.scores_dir = s.scores;
  if (s.reference) c.reference_dir = s.reference;
  if (!s.models.empty()) {
    c.models.clear();
    for (const auto& m : s.models) {
      const auto eq = m.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == m.size()) {
        throw ArgumentError("--model expects ID=DIR, got '" + m + "'");
      }
      c.models.emplace_back(m.substr(0, eq), fs::path(m.substr(eq + 1)));
    }
  }
  override(c.patch_size, s.patch_size);
  override(c.min_labels, s.min_labels);
  override(c.overlap, s.overlap);
  override(c.sigma_coeff, s.sigma_coeff);
  override(c.tau_mm, s.tau);
  override(c.alpha, s.alpha);
  override(c.split, s.split);
  if (s.case_aggregation) {
    if (*s.case_aggregation == "case_mean") c.case_aggregation = CaseAggregation::case_mean;
    else if (*s.case_aggregation == "pooled") c.case_aggregation = CaseAggregation::pooled;
    else throw ArgumentError("--case-aggregation expects case_mean or pooled");
  }
  if (s.scopes) c.scopes = split_list(*s.scopes);
  if (s.remap_truth) c.remap_truth = true;
  if (s.remap_predictions) c.remap_predictions = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation benchmark engine: fusion, metrics, ranking and statistics"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags common;
  SettingFlags s;
  app.add_option("--config", common.config, "Key-value configuration file");
  app.add_option("--out-dir", common.out_dir, "Output directory");
  app.add_option("--jobs", common.jobs, "Worker threads for per-case work");

  auto* fuse = app.add_subcommand("fuse", "Fuse sliding-window score patches into label volumes");
  fuse->add_option("--scores", s.scores, "Directory of <case>.vsbp score patch files");
  fuse->add_option("--reference", s.reference, "Directory of <case>.nii[.gz] volumes giving the output grid");
  fuse->add_option("--inventory", s.inventory, "Case inventory CSV");
  fuse->add_option("--patch-size", s.patch_size, "Window edge length in voxels");
  fuse->add_option("--overlap", s.overlap, "Window overlap fraction in [0, 1)");
  fuse->add_option("--sigma-coeff", s.sigma_coeff, "Gaussian sigma as a fraction of the patch size");
  fuse->add_option("--split", s.split, "Inventory split to use (train, val, test, all)");
  fuse->add_option("--min-labels", s.min_labels, "Minimum distinct labels per case");

  auto* evaluate = app.add_subcommand("evaluate", "Compute Dice and NSD for every model, case and label");
  evaluate->add_option("--ground-truth", s.ground_truth, "Directory of ground-truth label volumes");
  evaluate->add_option("--label-map", s.label_map, "Label map file");
  evaluate->add_option("--inventory", s.inventory, "Case inventory CSV");
  evaluate->add_option("--model", s.models, "Model predictions as ID=DIR (repeatable)");
  evaluate->add_option("--tau", s.tau, "NSD tolerance in mm");
  evaluate->add_option("--case-aggregation", s.case_aggregation, "case_mean or pooled");
  evaluate->add_option("--split", s.split, "Inventory split to use (train, val, test, all)");
  evaluate->add_option("--min-labels", s.min_labels, "Minimum distinct labels per case");
  evaluate->add_option("--scopes", s.scopes, "Comma-separated ranking scopes for the metric table");
  evaluate->add_flag("--remap-truth", s.remap_truth, "Apply the label map merges to ground truth");
  evaluate->add_flag("--remap-predictions", s.remap_predictions, "Apply the label map merges to predictions");

  RankOptions rank_options;
  auto* rank = app.add_subcommand("rank", "Rank models by segmentation accuracy and complexity");
  rank->add_option("--metrics", rank_options.metric_table, "Metric table CSV (model_id,metric_id,value)");
  rank->add_option("--manifest", rank_options.manifests, "Complexity manifest (repeatable)");
  rank->add_option("--complexity", rank_options.complexity_csv, "Complexity CSV");
  rank->add_option("--per-case", rank_options.per_case_metrics, "metrics.csv for the case-based ranking");
  rank->add_option("--label-map", s.label_map, "Label map file (for --per-case)");
  rank->add_option("--scopes", s.scopes, "Comma-separated scopes (btcv,surgical,total,label:N)");

  StatsOptions stats_options;
  auto* stats = app.add_subcommand("stats", "Two-way ANOVA and Tukey HSD on observation CSVs");
  stats->add_option("--observations", stats_options.observations, "Observation CSV (repeatable)");
  stats->add_option("--alpha", s.alpha, "Significance level for Tukey HSD");

  ComplexityOptions complexity_options;
  auto* complexity = app.add_subcommand("complexity", "Collect parameter counts and inference latency");
  complexity->add_option("--manifest", complexity_options.manifests, "Model manifest (repeatable)");
  complexity->add_option("--time-command", complexity_options.time_command, "Shell command to time");
  complexity->add_option("--runs", complexity_options.runs, "Timed runs, warmup included");
  complexity->add_option("--warmup", complexity_options.warmup, "Leading runs excluded from statistics");
  complexity->add_option("--model-id", complexity_options.model_id, "Model id for --time-command");
  complexity->add_option("--params", complexity_options.params_millions, "Parameter count in millions");

  ReportOptions report_options;
  auto* report = app.add_subcommand("report", "Render ranking tables and boxplot data");
  report->add_option("--bundle", report_options.bundle, "Directory holding ranking.csv and friends");
  report->add_option("--label-map", s.label_map, "Label map file (label names in boxplot.csv)");
  report->add_option("--scopes", s.scopes, "Comma-separated scopes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::argument);
  }

  try {
    const RunConfig config = resolve_config(common, s);
    if (fuse->parsed()) {
      cmd_fuse(config, std::cerr);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, std::cerr);
    } else if (rank->parsed()) {
      std::cout << format_ranking_text(cmd_rank(config, rank_options, std::cerr));
    } else if (stats->parsed()) {
      cmd_stats(config, stats_options, std::cerr);
    } else if (complexity->parsed()) {
      cmd_complexity(config, complexity_options, std::cerr);
    } else if (report->parsed()) {
      std::cout << cmd_report(config, report_options, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::internal);
  }
  return 0;
}
