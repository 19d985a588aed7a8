#include "segbench/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "segbench/csv.hpp"
#include "segbench/error.hpp"
#include "segbench/kv_file.hpp"

namespace segbench {

namespace {

bool same_score(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ArgumentError("unknown model '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

Direction direction_for(const DirectionRegistry& directions, const std::string& metric) {
  auto it = directions.find(metric);
  if (it == directions.end()) throw ArgumentError("no ranking direction registered for metric '" + metric + "'");
  return it->second;
}

}  // namespace

std::vector<double> rank_values(std::span<const double> values, Direction direction) {
  if (values.empty()) throw ArgumentError("ranking needs at least one model");
  for (double v : values) {
    if (!std::isfinite(v)) throw ArgumentError("cannot rank a non-finite value");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::higher_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the average 1-based rank.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<int> dense_rank(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw ArgumentError("cannot rank a non-finite score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<int> ranks(scores.size());
  int rank = 0;
  double group_start = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double s = scores[order[i]];
    if (i == 0 || !same_score(s, group_start)) {
      ++rank;
      group_start = s;
    }
    ranks[order[i]] = rank;
  }
  return ranks;
}

void MetricTable::set(const std::string& model, const std::string& metric, double value) {
  if (!std::isfinite(value)) throw ArgumentError("metric values must be finite (" + model + ", " + metric + ")");
  if (std::find(models_.begin(), models_.end(), model) == models_.end()) models_.push_back(model);
  if (std::find(metrics_.begin(), metrics_.end(), metric) == metrics_.end()) metrics_.push_back(metric);
  values_[{model, metric}] = value;
}

bool MetricTable::has(const std::string& model, const std::string& metric) const {
  return values_.count({model, metric}) != 0;
}

double MetricTable::value(const std::string& model, const std::string& metric) const {
  auto it = values_.find({model, metric});
  if (it == values_.end()) throw ArgumentError("no value for model '" + model + "', metric '" + metric + "'");
  return it->second;
}

std::vector<double> MetricTable::column(const std::string& metric) const {
  std::vector<double> out;
  out.reserve(models_.size());
  for (const auto& m : models_) out.push_back(value(m, metric));
  return out;
}

MetricTable MetricTable::read(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  const auto c_model = csv.column("model_id");
  const auto c_metric = csv.column("metric_id");
  const auto c_value = csv.column("value");
  MetricTable table;
  for (const auto& row : csv.rows) {
    if (table.has(row[c_model], row[c_metric])) {
      throw FormatError(csv.source + ": duplicate value for " + row[c_model] + "/" + row[c_metric]);
    }
    table.set(row[c_model], row[c_metric], parse_double(row[c_value], csv.source + ": value"));
  }
  return table;
}

std::string MetricTable::format() const {
  std::ostringstream out;
  out << "model_id,metric_id,value\n";
  for (const auto& model : models_) {
    for (const auto& metric : metrics_) {
      if (has(model, metric)) out << model << ',' << metric << ',' << format_full(value(model, metric)) << '\n';
    }
  }
  return out.str();
}

CategoryRanking category_ranking(const MetricTable& table, const CategorySpec& spec,
                                 const DirectionRegistry& directions) {
  if (spec.metric_ids.empty()) throw ArgumentError("category '" + spec.name + "' has no metrics");
  const auto& models = table.models();
  CategoryRanking out{spec.name, models, std::vector<double>(models.size(), 0.0), {}};
  for (const auto& metric : spec.metric_ids) {
    auto ranks = rank_values(table.column(metric), direction_for(directions, metric));
    for (std::size_t i = 0; i < models.size(); ++i) out.scores[i] += ranks[i];
  }
  for (auto& s : out.scores) s /= static_cast<double>(spec.metric_ids.size());
  out.ranks = dense_rank(out.scores);
  return out;
}

FinalRanking final_ranking(const CategoryRanking& segmentation, const CategoryRanking& complexity,
                           const std::string& name) {
  const std::set<std::string> a(segmentation.models.begin(), segmentation.models.end());
  const std::set<std::string> b(complexity.models.begin(), complexity.models.end());
  if (a != b || a.size() != segmentation.models.size() || b.size() != complexity.models.size()) {
    throw ArgumentError("segmentation and complexity rankings cover different models");
  }
  FinalRanking out{name, segmentation.models, {}, {}};
  for (std::size_t i = 0; i < segmentation.models.size(); ++i) {
    const double comp = complexity.scores[index_of(complexity.models, segmentation.models[i])];
    out.scores.push_back((segmentation.scores[i] + comp) / 2.0);
  }
  out.ranks = dense_rank(out.scores);
  return out;
}

CategoryRanking rank_then_aggregate(const std::vector<CaseMetricValue>& values, const DirectionRegistry& directions,
                                    const std::string& name) {
  if (values.empty()) throw ArgumentError("no per-case values to rank");
  std::vector<std::string> models;
  std::vector<std::pair<std::string, std::string>> cells;  // (case, metric)
  std::map<std::tuple<std::string, std::string, std::string>, double> lookup;
  for (const auto& v : values) {
    if (std::find(models.begin(), models.end(), v.model_id) == models.end()) models.push_back(v.model_id);
    std::pair<std::string, std::string> cell{v.case_id, v.metric_id};
    if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
    if (!lookup.emplace(std::make_tuple(v.case_id, v.metric_id, v.model_id), v.value).second) {
      throw ArgumentError("duplicate value for case " + v.case_id + ", metric " + v.metric_id + ", model " +
                          v.model_id);
    }
  }
  CategoryRanking out{name, models, std::vector<double>(models.size(), 0.0), {}};
  for (const auto& [case_id, metric] : cells) {
    std::vector<double> column;
    for (const auto& model : models) {
      auto it = lookup.find({case_id, metric, model});
      if (it == lookup.end()) {
        throw ArgumentError("missing value for case " + case_id + ", metric " + metric + ", model " + model);
      }
      column.push_back(it->second);
    }
    auto ranks = rank_values(column, direction_for(directions, metric));
    for (std::size_t i = 0; i < models.size(); ++i) out.scores[i] += ranks[i];
  }
  for (auto& s : out.scores) s /= static_cast<double>(cells.size());
  out.ranks = dense_rank(out.scores);
  return out;
}

RankingPlan standard_plan(const std::vector<std::string>& scopes, bool with_complexity) {
  RankingPlan plan;
  for (const auto& scope : scopes) {
    const std::string dice = "dice_" + scope;
    const std::string nsd = "nsd_" + scope;
    plan.directions[dice] = Direction::higher_better;
    plan.directions[nsd] = Direction::higher_better;
    plan.segmentation.push_back({"segmentation:" + scope, {dice, nsd}});
  }
  plan.directions["params_millions"] = Direction::lower_better;
  plan.directions["latency_mean_ms"] = Direction::lower_better;
  if (with_complexity) plan.complexity = CategorySpec{"complexity", {"params_millions", "latency_mean_ms"}};
  return plan;
}

const CategoryRanking* RankingResult::category(const std::string& name) const {
  for (const auto& c : categories) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const FinalRanking* RankingResult::final_for(const std::string& name) const {
  for (const auto& f : finals) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

RankingResult rank_models(const MetricTable& table, const RankingPlan& plan) {
  if (table.models().empty()) throw ArgumentError("metric table is empty");
  RankingResult result;
  result.models = table.models();
  std::vector<std::string> metrics;
  for (const auto& spec : plan.segmentation) metrics.insert(metrics.end(), spec.metric_ids.begin(), spec.metric_ids.end());
  if (plan.complexity) {
    metrics.insert(metrics.end(), plan.complexity->metric_ids.begin(), plan.complexity->metric_ids.end());
  }
  for (const auto& metric : metrics) {
    if (!result.metric_ranks.count(metric)) {
      result.metric_ranks[metric] = rank_values(table.column(metric), direction_for(plan.directions, metric));
    }
  }
  for (const auto& spec : plan.segmentation) result.categories.push_back(category_ranking(table, spec, plan.directions));
  if (plan.complexity) {
    auto comp = category_ranking(table, *plan.complexity, plan.directions);
    for (const auto& seg : std::vector<CategoryRanking>(result.categories)) {
      std::string scope = seg.name.substr(seg.name.find(':') + 1);
      result.finals.push_back(final_ranking(seg, comp, "final:" + scope));
    }
    result.categories.push_back(std::move(comp));
  }
  return result;
}

std::string format_ranking_csv(const RankingResult& result, const MetricTable& table) {
  std::ostringstream out;
  out << "model_id,kind,key,value,rank\n";
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    const auto& model = result.models[i];
    for (const auto& metric : table.metrics()) {
      auto it = result.metric_ranks.find(metric);
      if (it == result.metric_ranks.end()) continue;
      out << model << ",metric," << metric << ',' << format_full(table.value(model, metric)) << ','
          << format_full(it->second[i]) << '\n';
    }
    for (const auto& c : result.categories) {
      out << model << ",category," << c.name << ',' << format_full(c.scores[i]) << ',' << c.ranks[i] << '\n';
    }
    for (const auto& f : result.finals) {
      out << model << ",final," << f.name << ',' << format_full(f.scores[i]) << ',' << f.ranks[i] << '\n';
    }
  }
  return out.str();
}

std::string format_ranking_text(const RankingResult& result) {
  std::vector<std::string> headers{"Model"};
  std::vector<std::vector<std::string>> cells(result.models.size());
  for (std::size_t i = 0; i < result.models.size(); ++i) cells[i].push_back(result.models[i]);
  for (const auto& c : result.categories) {
    headers.push_back(c.name);
    for (std::size_t i = 0; i < result.models.size(); ++i) {
      cells[i].push_back(fmt::format("{} ({:.4f})", c.ranks[i], c.scores[i]));
    }
  }
  for (const auto& f : result.finals) {
    headers.push_back(f.name);
    for (std::size_t i = 0; i < result.models.size(); ++i) {
      cells[i].push_back(fmt::format("{} ({:.4f})", f.ranks[i], f.scores[i]));
    }
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : cells) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += (c == 0 ? "" : "  ") + fmt::format("{:<{}}", row[c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit(headers);
  std::vector<std::string> rule;
  for (auto w : widths) rule.emplace_back(w, '-');
  emit(rule);
  for (const auto& row : cells) emit(row);
  return out.str();
}

}  // namespace segbench
