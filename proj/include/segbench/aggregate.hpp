#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segbench/metrics.hpp"

namespace segbench {

enum class MetricKind { dice, nsd };
std::string_view to_string(MetricKind metric);

enum class ScopeKind { label, btcv, surgical, total };

struct Scope {
  ScopeKind kind = ScopeKind::total;
  Label label = 0;  // only for ScopeKind::label

  static Scope of_label(Label l) { return {ScopeKind::label, l}; }
  bool operator==(const Scope&) const = default;
};
// "btcv", "surgical", "total" or "label:<id>".
std::string to_string(const Scope& scope);
Scope parse_scope(std::string_view text);

// How group scopes combine labels across cases.
enum class CaseAggregation {
  // Mean over the defined labels of each case first, then mean/std over cases.
  case_mean,
  // Mean/std over every defined (case, label) value.
  pooled,
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation; 0 for n == 1
};
MeanStd mean_std(std::span<const double> values);

struct AggregateRow {
  std::string model_id;
  Scope scope;
  MetricKind metric = MetricKind::dice;
  std::optional<double> mean;  // nullopt when no value in scope is defined
  std::optional<double> std;
  std::size_t count = 0;       // number of values the statistics are over
};

// Rows for one scope, for every model (first-appearance order) and both metrics.
std::vector<AggregateRow> aggregate(const std::vector<MetricRecord>& records, const LabelMap& map,
                                    const Scope& scope, CaseAggregation mode = CaseAggregation::case_mean);

// btcv, surgical and total scopes followed by every per-label scope.
std::vector<AggregateRow> aggregate_all(const std::vector<MetricRecord>& records, const LabelMap& map,
                                        CaseAggregation mode = CaseAggregation::case_mean);

// CSV `model_id,scope,metric,mean,std,n` (NA for undefined).
std::string format_aggregates(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregates(const std::filesystem::path& path);

// Labels a scope covers under `map`.
std::vector<Label> scope_labels(const Scope& scope, const LabelMap& map);

}  // namespace segbench
