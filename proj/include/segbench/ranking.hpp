#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segbench {

enum class Direction { higher_better, lower_better };

// Fractional ranks, 1 = best; tied values share the mean of their positions.
std::vector<double> rank_values(std::span<const double> values, Direction direction);

// Dense ranks of scores where lower is better: distinct scores map to
// 1, 2, 3, ...; scores equal up to 1e-9 relative share a rank.
std::vector<int> dense_rank(std::span<const double> scores);

// model -> metric -> value, keeping first-insertion order of both keys.
class MetricTable {
 public:
  void set(const std::string& model, const std::string& metric, double value);

  const std::vector<std::string>& models() const noexcept { return models_; }
  const std::vector<std::string>& metrics() const noexcept { return metrics_; }
  bool has(const std::string& model, const std::string& metric) const;
  double value(const std::string& model, const std::string& metric) const;
  // One value per model (in model order); throws ArgumentError if any is missing.
  std::vector<double> column(const std::string& metric) const;

  // CSV `model_id,metric_id,value`.
  static MetricTable read(const std::filesystem::path& path);
  std::string format() const;

 private:
  std::vector<std::string> models_;
  std::vector<std::string> metrics_;
  std::map<std::pair<std::string, std::string>, double> values_;
};

using DirectionRegistry = std::map<std::string, Direction>;

struct CategorySpec {
  std::string name;  // e.g. "complexity", "segmentation:total"
  std::vector<std::string> metric_ids;
};

struct CategoryRanking {
  std::string name;
  std::vector<std::string> models;
  std::vector<double> scores;  // mean of per-metric ranks
  std::vector<int> ranks;      // dense
};

// Per-metric fractional ranks, averaged per model, then densified.
CategoryRanking category_ranking(const MetricTable& table, const CategorySpec& spec,
                                 const DirectionRegistry& directions);

struct FinalRanking {
  std::string name;
  std::vector<std::string> models;
  std::vector<double> scores;
  std::vector<int> ranks;
};

// Averages the raw category scores (not their dense ranks) per model and
// dense-ranks the result. Model order follows `segmentation`.
FinalRanking final_ranking(const CategoryRanking& segmentation, const CategoryRanking& complexity,
                           const std::string& name = "final");

// One per-case observation for the case-based scheme.
struct CaseMetricValue {
  std::string case_id;
  std::string model_id;
  std::string metric_id;
  double value = 0.0;
};

// Ranks models per (case, metric), averages every rank of a model and
// dense-ranks the averages. Models are reported in first-appearance order.
CategoryRanking rank_then_aggregate(const std::vector<CaseMetricValue>& values, const DirectionRegistry& directions,
                                    const std::string& name = "case-based");

// What to rank: segmentation categories per label scope, plus an optional
// complexity category that enables final rankings.
struct RankingPlan {
  DirectionRegistry directions;
  std::vector<CategorySpec> segmentation;  // named "segmentation:<scope>"
  std::optional<CategorySpec> complexity;
};

// dice_<scope>/nsd_<scope> segmentation metrics for each scope and
// params_millions/latency_mean_ms for complexity.
RankingPlan standard_plan(const std::vector<std::string>& scopes = {"btcv", "surgical", "total"},
                          bool with_complexity = true);

struct RankingResult {
  std::vector<std::string> models;
  std::map<std::string, std::vector<double>> metric_ranks;
  std::vector<CategoryRanking> categories;  // segmentation scopes, then complexity
  std::vector<FinalRanking> finals;         // one per segmentation scope

  const CategoryRanking* category(const std::string& name) const;
  const FinalRanking* final_for(const std::string& name) const;
};

RankingResult rank_models(const MetricTable& table, const RankingPlan& plan);

// CSV `model_id,kind,key,value,rank`: kind is metric (value = metric value,
// rank = fractional rank), category or final (value = score, rank = dense).
std::string format_ranking_csv(const RankingResult& result, const MetricTable& table);
// Aligned text table: one row per model, one column per category/final.
std::string format_ranking_text(const RankingResult& result);

}  // namespace segbench
