#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segbench/label_map.hpp"
#include "segbench/surface.hpp"

namespace segbench {

// 2|A n B| / (|A| + |B|); nullopt when both masks are empty.
std::optional<double> dice(const Mask& a, const Mask& b);

// Normalized surface distance at tolerance `tau` mm: the fraction of both
// surfaces lying within `tau` of the other. nullopt when both surfaces are
// empty; 0 when exactly one is.
std::optional<double> nsd(const Mask& a, const Mask& b, const Vec3& spacing, double tau = 3.0);
std::optional<double> nsd(const SurfaceSet& a, const SurfaceSet& b, double tau = 3.0);

struct MetricRecord {
  std::string case_id;
  std::string model_id;
  Label label = 0;
  std::optional<double> dice;
  std::optional<double> nsd;

  bool operator==(const MetricRecord&) const = default;
};

struct EvaluationOptions {
  double tau_mm = 3.0;
};

// One record per target label of `map`, in label order. Prediction and
// truth must share dims and spacing; voxel IDs outside the map are ignored.
std::vector<MetricRecord> evaluate_case(const LabelVolume& prediction, const LabelVolume& truth,
                                        const LabelMap& map, const EvaluationOptions& options = {},
                                        const std::string& case_id = {}, const std::string& model_id = {});

// CSV `case_id,model_id,label_id,dice,nsd`; undefined values are `NA`.
std::string format_metric_records(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_metric_records(const std::filesystem::path& path);

}  // namespace segbench
