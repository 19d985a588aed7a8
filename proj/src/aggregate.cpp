#include "segbench/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "segbench/csv.hpp"
#include "segbench/kv_file.hpp"

namespace segbench {

namespace {

std::optional<double> value_of(const MetricRecord& r, MetricKind metric) {
  return metric == MetricKind::dice ? r.dice : r.nsd;
}

std::vector<std::string> model_order(const std::vector<MetricRecord>& records) {
  std::vector<std::string> models;
  for (const auto& r : records) {
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
  }
  return models;
}

AggregateRow summarize(const std::string& model, const Scope& scope, MetricKind metric,
                       const std::vector<double>& values) {
  AggregateRow row{model, scope, metric, std::nullopt, std::nullopt, values.size()};
  if (!values.empty()) {
    auto ms = mean_std(values);
    row.mean = ms.mean;
    row.std = ms.std;
  }
  return row;
}

}  // namespace

std::string_view to_string(MetricKind metric) { return metric == MetricKind::dice ? "dice" : "nsd"; }

std::string to_string(const Scope& scope) {
  switch (scope.kind) {
    case ScopeKind::btcv: return "btcv";
    case ScopeKind::surgical: return "surgical";
    case ScopeKind::total: return "total";
    case ScopeKind::label: return "label:" + std::to_string(scope.label);
  }
  return "?";
}

Scope parse_scope(std::string_view text) {
  if (text == "btcv") return {ScopeKind::btcv, 0};
  if (text == "surgical") return {ScopeKind::surgical, 0};
  if (text == "total") return {ScopeKind::total, 0};
  if (text.rfind("label:", 0) == 0) {
    long long id = parse_int(text.substr(6), "scope");
    if (id <= 0 || id > 65535) throw FormatError("scope label out of range: " + std::string(text));
    return Scope::of_label(static_cast<Label>(id));
  }
  throw FormatError("unknown scope '" + std::string(text) + "'");
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<Label> scope_labels(const Scope& scope, const LabelMap& map) {
  switch (scope.kind) {
    case ScopeKind::btcv: return map.group_labels(LabelGroup::btcv);
    case ScopeKind::surgical: return map.group_labels(LabelGroup::surgical);
    case ScopeKind::label: return {scope.label};
    case ScopeKind::total: break;
  }
  std::vector<Label> all;
  for (const auto& t : map.targets()) all.push_back(t.id);
  return all;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricRecord>& records, const LabelMap& map,
                                    const Scope& scope, CaseAggregation mode) {
  if (records.empty()) throw ArgumentError("no metric records to aggregate");
  const auto labels = scope_labels(scope, map);
  std::vector<bool> in_scope(map.target_count() + 1, false);
  for (Label l : labels) {
    if (map.is_target(l)) in_scope[l] = true;
  }
  const bool per_case = scope.kind != ScopeKind::label && mode == CaseAggregation::case_mean;

  std::vector<AggregateRow> rows;
  for (const auto& model : model_order(records)) {
    for (MetricKind metric : {MetricKind::dice, MetricKind::nsd}) {
      std::vector<double> values;
      // case -> (sum, count), in first-appearance order
      std::vector<std::string> cases;
      std::map<std::string, std::pair<double, std::size_t>> per_case_sums;
      for (const auto& r : records) {
        if (r.model_id != model || r.label >= in_scope.size() || !in_scope[r.label]) continue;
        auto v = value_of(r, metric);
        if (!v) continue;
        if (!per_case) {
          values.push_back(*v);
          continue;
        }
        auto [it, inserted] = per_case_sums.try_emplace(r.case_id, 0.0, 0);
        if (inserted) cases.push_back(r.case_id);
        it->second.first += *v;
        it->second.second += 1;
      }
      for (const auto& c : cases) {
        const auto& [sum, n] = per_case_sums[c];
        values.push_back(sum / static_cast<double>(n));
      }
      rows.push_back(summarize(model, scope, metric, values));
    }
  }
  return rows;
}

std::vector<AggregateRow> aggregate_all(const std::vector<MetricRecord>& records, const LabelMap& map,
                                        CaseAggregation mode) {
  std::vector<AggregateRow> rows;
  std::vector<Scope> scopes{{ScopeKind::btcv, 0}, {ScopeKind::surgical, 0}, {ScopeKind::total, 0}};
  for (const auto& t : map.targets()) scopes.push_back(Scope::of_label(t.id));
  for (const auto& scope : scopes) {
    auto part = aggregate(records, map, scope, mode);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string format_aggregates(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "model_id,scope,metric,mean,std,n\n";
  for (const auto& r : rows) {
    out << r.model_id << ',' << to_string(r.scope) << ',' << to_string(r.metric) << ','
        << (r.mean ? format_full(*r.mean) : "NA") << ',' << (r.std ? format_full(*r.std) : "NA") << ','
        << r.count << '\n';
  }
  return out.str();
}

std::vector<AggregateRow> read_aggregates(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_model = table.column("model_id");
  const auto c_scope = table.column("scope");
  const auto c_metric = table.column("metric");
  const auto c_mean = table.column("mean");
  const auto c_std = table.column("std");
  const auto c_n = table.column("n");
  std::vector<AggregateRow> rows;
  for (const auto& row : table.rows) {
    AggregateRow r;
    r.model_id = row[c_model];
    r.scope = parse_scope(row[c_scope]);
    if (row[c_metric] == "dice") r.metric = MetricKind::dice;
    else if (row[c_metric] == "nsd") r.metric = MetricKind::nsd;
    else throw FormatError(table.source + ": unknown metric '" + row[c_metric] + "'");
    if (row[c_mean] != "NA") r.mean = parse_double(row[c_mean], table.source + ": mean");
    if (row[c_std] != "NA") r.std = parse_double(row[c_std], table.source + ": std");
    r.count = static_cast<std::size_t>(parse_int(row[c_n], table.source + ": n"));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace segbench
