#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "segbench/aggregate.hpp"
#include "segbench/label_map.hpp"
#include "segbench/metrics.hpp"

namespace segbench {

// One value per case, model (factor A) and label group (factor B).
struct Observation {
  std::string case_id;
  std::string model_id;
  std::string group;
  double value = 0.0;
};

struct AnovaSource {
  std::string name;
  double ss = 0.0;
  int df = 0;
  double ms = 0.0;
  double f = 0.0;  // NaN for the error row
  double p = 1.0;  // NaN for the error row
};

struct AnovaResult {
  std::vector<std::string> models;  // factor A levels, first-appearance order
  std::vector<std::string> groups;  // factor B levels
  std::size_t replicates = 0;       // per cell
  AnovaSource model;
  AnovaSource group;
  AnovaSource interaction;
  AnovaSource error;
  double ss_total = 0.0;
  bool zero_error = false;  // error sum of squares at rounding-noise level
};

// Fixed-effects two-way ANOVA on a balanced design (equal replicate count
// n >= 2 in every model x group cell, >= 2 levels per factor); violations
// are DataError. When the error mean square is zero, F = 0 and p = 1 for a
// source whose sum of squares is also zero, otherwise F = +inf and p = 0.
AnovaResult two_way_anova(const std::vector<Observation>& observations);

struct TukeyPair {
  std::string model_a;
  std::string model_b;
  double mean_diff = 0.0;  // mean_a - mean_b
  double std_error = 0.0;
  double q = 0.0;
  double p = 1.0;
  bool significant = false;  // p < alpha
};

struct TukeyGroup {
  std::string name;
  std::vector<double> values;
};

// All-pairs Tukey HSD with a known error mean square. Groups must have
// equal size (DataError otherwise); mse must be positive.
std::vector<TukeyPair> tukey_hsd(const std::vector<TukeyGroup>& groups, double mse, double df_error,
                                 double alpha = 0.05);

// Tukey HSD on the model factor, pooling both label groups, using the
// two-way ANOVA error term. A zero error mean square gives q = 0, p = 1 for
// equal means and q = +inf, p = 0 otherwise.
std::vector<TukeyPair> tukey_models(const std::vector<Observation>& observations, const AnovaResult& anova,
                                    double alpha = 0.05);

// Per case, model and label group: the mean of the defined per-label values
// of `metric`. Cases lacking a defined group mean for some model or group
// are dropped for every model so the design stays balanced.
std::vector<Observation> group_observations(const std::vector<MetricRecord>& records, const LabelMap& map,
                                            MetricKind metric);

// CSV `case_id,model_id,group,value`.
std::string format_observations(const std::vector<Observation>& observations);
std::vector<Observation> read_observations(const std::filesystem::path& path);

// CSV `source,ss,df,ms,f,p` with rows model, group, interaction, error.
std::string format_anova(const AnovaResult& result);
// CSV `model_a,model_b,mean_diff,std_error,q,p,significant`.
std::string format_tukey(const std::vector<TukeyPair>& pairs);

}  // namespace segbench
