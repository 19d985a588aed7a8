#include "segbench/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "segbench/cases.hpp"
#include "segbench/complexity.hpp"
#include "segbench/csv.hpp"
#include "segbench/error.hpp"
#include "segbench/fusion.hpp"
#include "segbench/metrics.hpp"
#include "segbench/nifti.hpp"
#include "segbench/report.hpp"
#include "segbench/score_patch_file.hpp"
#include "segbench/stats.hpp"

namespace fs = std::filesystem;

namespace segbench {

namespace {

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the exception of the
// lowest failing index.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(jobs, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Re-throws `e` with a case prefix, keeping its exit-code class.
[[noreturn]] void rethrow_for_case(const std::string& case_id) {
  const std::string prefix = "case " + case_id + ": ";
  try {
    throw;
  } catch (const ArgumentError& e) {
    throw ArgumentError(prefix + e.what());
  } catch (const FormatError& e) {
    throw FormatError(prefix + e.what());
  } catch (const CapabilityError& e) {
    throw CapabilityError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const ExecutionError& e) {
    throw ExecutionError(prefix + e.what());
  } catch (const InternalError& e) {
    throw InternalError(prefix + e.what());
  }
}

const fs::path& require_path(const std::optional<fs::path>& p, const char* what) {
  if (!p) throw ArgumentError(std::string("missing required setting: ") + what);
  return *p;
}

void require_directory(const fs::path& dir, const std::string& what) {
  if (!fs::is_directory(dir)) throw ArgumentError(what + " is not a directory: " + dir.string());
}

std::string volume_stem(const fs::path& p) {
  const std::string name = p.filename().string();
  for (const char* ext : {".nii.gz", ".nii"}) {
    const std::string e(ext);
    if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
      return name.substr(0, name.size() - e.size());
    }
  }
  return {};
}

std::vector<std::string> volume_cases(const fs::path& dir) {
  std::set<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto stem = volume_stem(entry.path());
    if (!stem.empty()) stems.insert(stem);
  }
  return {stems.begin(), stems.end()};
}

fs::path find_volume(const fs::path& dir, const std::string& case_id, const std::string& what) {
  for (const char* ext : {".nii.gz", ".nii"}) {
    fs::path p = dir / (case_id + ext);
    if (fs::is_regular_file(p)) return p;
  }
  throw DataError("case " + case_id + ": no " + what + " volume in " + dir.string());
}

std::vector<std::string> select_cases(const RunConfig& config, const fs::path& fallback_dir, std::ostream& log,
                                      const LabelMap* map) {
  if (!config.inventory) return volume_cases(fallback_dir);
  auto inventory = CaseInventory::load(*config.inventory);
  if (map) inventory.check_labels(*map);
  if (config.split != "all") {
    std::erase_if(inventory.cases, [&](const CaseEntry& c) { return to_string(c.split) != config.split; });
  }
  auto cases = filter_cases(inventory, config.min_labels);
  log << "selected " << cases.size() << " of " << inventory.cases.size() << " " << config.split
      << " cases with >= " << config.min_labels << " labels\n";
  return cases;
}

std::string observation_name(const fs::path& p) {
  std::string stem = p.stem().string();
  const std::string prefix = "observations_";
  if (stem.rfind(prefix, 0) == 0 && stem.size() > prefix.size()) stem = stem.substr(prefix.size());
  return stem;
}

std::vector<CaseMetricValue> per_case_values(const std::vector<MetricRecord>& records, const LabelMap& map,
                                             const std::vector<std::string>& scopes) {
  std::vector<CaseMetricValue> out;
  std::vector<std::string> cases, models;
  for (const auto& r : records) {
    if (std::find(cases.begin(), cases.end(), r.case_id) == cases.end()) cases.push_back(r.case_id);
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
  }
  for (const auto& scope_name : scopes) {
    const auto labels = scope_labels(parse_scope(scope_name), map);
    const std::set<Label> in_scope(labels.begin(), labels.end());
    for (auto kind : {MetricKind::dice, MetricKind::nsd}) {
      const std::string metric = std::string(to_string(kind)) + "_" + scope_name;
      std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
      for (const auto& r : records) {
        const auto& v = kind == MetricKind::dice ? r.dice : r.nsd;
        if (!v || !in_scope.count(r.label)) continue;
        auto& s = sums[{r.case_id, r.model_id}];
        s.first += *v;
        s.second += 1;
      }
      for (const auto& c : cases) {
        // A case enters the ranking only when every model has a value.
        const bool complete = std::all_of(models.begin(), models.end(),
                                          [&](const auto& m) { return sums.count({c, m}) != 0; });
        if (!complete) continue;
        for (const auto& m : models) {
          const auto& s = sums.at({c, m});
          out.push_back({c, m, metric, s.first / static_cast<double>(s.second)});
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<fs::path> cmd_fuse(const RunConfig& config, std::ostream& log) {
  const auto& scores_dir = require_path(config.scores_dir, "paths/scores (--scores)");
  const auto& reference_dir = require_path(config.reference_dir, "paths/reference (--reference)");
  require_directory(scores_dir, "score directory");
  require_directory(reference_dir, "reference directory");
  const auto cases = select_cases(config, reference_dir, log, nullptr);
  if (cases.empty()) throw DataError("no cases to fuse");
  const auto importance = gaussian_weights(config.patch_size, config.sigma_coeff);
  std::vector<fs::path> written(cases.size());
  parallel_for(cases.size(), config.jobs, [&](std::size_t i) {
    const auto& case_id = cases[i];
    try {
      const fs::path file = scores_dir / (case_id + ".vsbp");
      if (!fs::is_regular_file(file)) throw DataError("missing score patch file " + file.string());
      const auto reference = read_nifti(find_volume(reference_dir, case_id, "reference"));
      const auto fused = fuse_file(file, importance, reference.dims);
      LabelVolume out{fused.labels, reference.spacing, reference.origin};
      written[i] = config.out_dir / "fused" / (case_id + ".nii.gz");
      fs::create_directories(written[i].parent_path());
      write_labels(written[i], out);
    } catch (const ArgumentError& e) {
      // Window geometry or class counts in the file disagree with the case.
      throw DataError("case " + case_id + ": " + e.what());
    } catch (const Error&) {
      rethrow_for_case(case_id);
    }
  });
  log << "fused " << cases.size() << " cases\n";
  return written;
}

void cmd_evaluate(const RunConfig& config, std::ostream& log) {
  const auto& truth_dir = require_path(config.ground_truth_dir, "paths/ground_truth (--ground-truth)");
  const auto map = LabelMap::load(require_path(config.label_map, "paths/label_map (--label-map)"));
  if (!map.has_standard_grouping()) {
    log << "warning: label map does not have the standard 13 btcv + 12 surgical grouping\n";
  }
  if (config.models.empty()) throw ArgumentError("no models configured (--model ID=DIR or [models])");
  require_directory(truth_dir, "ground-truth directory");
  for (const auto& [model, dir] : config.models) require_directory(dir, "prediction directory of " + model);
  const auto cases = select_cases(config, truth_dir, log, &map);
  if (cases.empty()) throw DataError("no cases to evaluate");

  EvaluationOptions options{config.tau_mm};
  std::vector<std::vector<MetricRecord>> per_case(cases.size());
  parallel_for(cases.size(), config.jobs, [&](std::size_t i) {
    const auto& case_id = cases[i];
    try {
      auto truth = read_labels(find_volume(truth_dir, case_id, "ground-truth"));
      if (config.remap_truth) truth = remap_labels(truth, map);
      for (const auto& [model, dir] : config.models) {
        auto pred = read_labels(find_volume(dir, case_id, "prediction (" + model + ")"));
        if (config.remap_predictions) pred = remap_labels(pred, map);
        auto records = evaluate_case(pred, truth, map, options, case_id, model);
        per_case[i].insert(per_case[i].end(), records.begin(), records.end());
      }
    } catch (const Error&) {
      rethrow_for_case(case_id);
    }
  });
  std::vector<MetricRecord> records;
  for (auto& r : per_case) records.insert(records.end(), r.begin(), r.end());

  write_text_file(config.out_dir / "metrics.csv", format_metric_records(records));
  const auto aggregates = aggregate_all(records, map, config.case_aggregation);
  write_text_file(config.out_dir / "aggregates.csv", format_aggregates(aggregates));

  MetricTable table;
  for (const auto& scope : config.scopes) {
    const auto parsed = parse_scope(scope);
    for (const auto& row : aggregates) {
      if (row.scope == parsed && row.mean) {
        table.set(row.model_id, std::string(to_string(row.metric)) + "_" + scope, *row.mean);
      }
    }
  }
  write_text_file(config.out_dir / "metric_table.csv", table.format());
  for (auto kind : {MetricKind::dice, MetricKind::nsd}) {
    const auto obs = group_observations(records, map, kind);
    write_text_file(config.out_dir / ("observations_" + std::string(to_string(kind)) + ".csv"),
                    format_observations(obs));
  }
  log << "evaluated " << cases.size() << " cases x " << config.models.size() << " models\n";
}

RankingResult cmd_rank(const RunConfig& config, const RankOptions& options, std::ostream& log) {
  const fs::path table_path = options.metric_table.value_or(config.out_dir / "metric_table.csv");
  auto table = MetricTable::read(table_path);
  if (table.models().empty()) throw DataError(table_path.string() + ": no rows");

  std::vector<ComplexityRecord> complexity;
  if (options.complexity_csv) complexity = read_complexity(*options.complexity_csv);
  for (const auto& m : options.manifests) complexity.push_back(ingest_manifest(m));
  std::set<std::string> seen;
  for (const auto& c : complexity) {
    if (!seen.insert(c.model_id).second) throw DataError("complexity given twice for model '" + c.model_id + "'");
    if (std::find(table.models().begin(), table.models().end(), c.model_id) == table.models().end()) {
      throw DataError("complexity record for model '" + c.model_id + "' which has no metrics");
    }
    table.set(c.model_id, "params_millions", c.params_millions);
    table.set(c.model_id, "latency_mean_ms", c.latency_mean_ms);
  }
  const bool has_complexity = std::all_of(table.models().begin(), table.models().end(), [&](const auto& m) {
    return table.has(m, "params_millions") && table.has(m, "latency_mean_ms");
  });
  if (!has_complexity) {
    log << "warning: no complexity data for every model; skipping complexity and final rankings\n";
  }
  auto plan = standard_plan(config.scopes, has_complexity);
  for (const auto& [metric, direction] : config.directions) plan.directions[metric] = direction;
  const auto result = rank_models(table, plan);
  write_text_file(config.out_dir / "ranking.csv", format_ranking_csv(result, table));
  write_text_file(config.out_dir / "ranking.txt", format_ranking_text(result));

  if (options.per_case_metrics) {
    const auto map = LabelMap::load(require_path(config.label_map, "paths/label_map (--label-map)"));
    const auto records = read_metric_records(*options.per_case_metrics);
    std::ostringstream out;
    out << "model_id,scheme,key,value,rank\n";
    for (const auto& scope : config.scopes) {
      auto values = per_case_values(records, map, {scope});
      if (values.empty()) throw DataError("no complete per-case values for scope " + scope);
      const auto ranking = rank_then_aggregate(values, plan.directions, "case-based:" + scope);
      for (std::size_t i = 0; i < ranking.models.size(); ++i) {
        out << ranking.models[i] << ",rank_then_aggregate," << ranking.name << ',' << format_full(ranking.scores[i])
            << ',' << ranking.ranks[i] << '\n';
      }
    }
    write_text_file(config.out_dir / "ranking_per_case.csv", out.str());
  }
  log << "ranked " << table.models().size() << " models\n";
  return result;
}

void cmd_stats(const RunConfig& config, const StatsOptions& options, std::ostream& log) {
  std::vector<fs::path> files = options.observations;
  if (files.empty()) {
    for (const char* name : {"observations_dice.csv", "observations_nsd.csv"}) {
      const fs::path p = config.out_dir / name;
      if (fs::is_regular_file(p)) files.push_back(p);
    }
    if (files.empty()) throw ArgumentError("no observation files given and none found in " + config.out_dir.string());
  }
  if (!config.stats_enabled) {
    log << "statistics disabled in config; nothing to do\n";
    return;
  }
  for (const auto& file : files) {
    const auto obs = read_observations(file);
    const auto anova = two_way_anova(obs);
    const auto tukey = tukey_models(obs, anova, config.alpha);
    const std::string name = observation_name(file);
    write_text_file(config.out_dir / ("anova_" + name + ".csv"), format_anova(anova));
    write_text_file(config.out_dir / ("tukey_" + name + ".csv"), format_tukey(tukey));
    log << name << ": model p = " << anova.model.p << ", group p = " << anova.group.p << '\n';
  }
}

void cmd_complexity(const RunConfig& config, const ComplexityOptions& options, std::ostream& log) {
  std::vector<fs::path> manifests = options.manifests;
  if (options.time_command) {
    if (options.model_id.empty()) throw ArgumentError("--time-command needs --model-id");
    if (!options.params_millions) throw ArgumentError("--time-command needs --params");
    const auto series = time_command(*options.time_command, options.runs, options.warmup);
    const auto stats = latency_stats(series);
    const std::string series_name = "latency_" + options.model_id + ".txt";
    write_text_file(config.out_dir / series_name, format_latency_series(series.samples_ms));
    ComplexityRecord record{options.model_id, *options.params_millions, stats.mean_ms, stats.std_ms};
    std::string manifest = format_manifest(record, series_name);
    if (options.warmup != kDefaultWarmup) manifest += "warmup = " + std::to_string(options.warmup) + "\n";
    const fs::path manifest_path = config.out_dir / ("manifest_" + options.model_id + ".ini");
    write_text_file(manifest_path, manifest);
    manifests.push_back(manifest_path);
  }
  if (manifests.empty()) throw ArgumentError("no manifests given (--manifest or --time-command)");
  std::vector<ComplexityRecord> records;
  for (const auto& m : manifests) records.push_back(ingest_manifest(m));
  write_text_file(config.out_dir / "complexity.csv", format_complexity(records));
  log << "wrote complexity for " << records.size() << " models\n";
}

std::string cmd_report(const RunConfig& config, const ReportOptions& options, std::ostream& log) {
  const fs::path bundle = options.bundle.value_or(config.out_dir);
  const fs::path ranking_path = bundle / "ranking.csv";
  if (!fs::is_regular_file(ranking_path)) {
    throw DataError("bundle " + bundle.string() + " has no ranking.csv (run `rank` first)");
  }
  ReportInputs inputs;
  inputs.scopes = config.scopes;
  inputs.ranking = read_ranking_rows(ranking_path);
  if (fs::is_regular_file(bundle / "aggregates.csv")) inputs.aggregates = read_aggregates(bundle / "aggregates.csv");
  if (fs::is_regular_file(bundle / "complexity.csv")) inputs.complexity = read_complexity(bundle / "complexity.csv");
  const std::string report = render_report(inputs);
  write_text_file(config.out_dir / "report.txt", report);

  if (fs::is_regular_file(bundle / "metrics.csv")) {
    std::optional<LabelMap> map;
    if (config.label_map) map = LabelMap::load(*config.label_map);
    const auto records = read_metric_records(bundle / "metrics.csv");
    write_text_file(config.out_dir / "boxplot.csv", format_boxplot(records, map ? &*map : nullptr));
  } else {
    log << "note: no metrics.csv in bundle; boxplot export skipped\n";
  }
  return report;
}

}  // namespace segbench
