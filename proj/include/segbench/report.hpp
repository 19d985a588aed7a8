#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segbench/aggregate.hpp"
#include "segbench/complexity.hpp"
#include "segbench/label_map.hpp"
#include "segbench/metrics.hpp"

namespace segbench {

// One line of ranking.csv.
struct RankingRow {
  std::string model_id;
  std::string kind;  // metric, category or final
  std::string key;
  double value = 0.0;
  double rank = 0.0;
};

std::vector<RankingRow> read_ranking_rows(const std::filesystem::path& path);

// Rank rendered with Unicode superscript digits; fractional ranks keep one
// decimal with a raised dot (2.5 -> "²·⁵").
std::string superscript_rank(double rank);

// Terminal columns of a UTF-8 string (one per code point).
std::size_t display_width(std::string_view text);

struct ReportInputs {
  std::vector<RankingRow> ranking;
  std::vector<AggregateRow> aggregates;       // optional: adds ±std to metric cells
  std::vector<ComplexityRecord> complexity;   // optional: adds ±std to latency
  std::vector<std::string> scopes{"btcv", "surgical", "total"};
};

// Aligned text table: model complexity, per-scope Dice and NSD with metric
// ranks as superscripts, then segmentation and final rankings per scope.
// Numbers carry 4 decimals. Columns without data are omitted.
std::string render_report(const ReportInputs& inputs);

// CSV `model_id,label_id,label_name,case_id,dice,nsd`, one row per
// (model, label, case); label names come from `map` when given.
std::string format_boxplot(const std::vector<MetricRecord>& records, const LabelMap* map);

}  // namespace segbench
