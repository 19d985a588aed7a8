#include "segbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "segbench/csv.hpp"
#include "segbench/kv_file.hpp"

namespace segbench {

namespace {

void check_same_dims(const Mask& a, const Mask& b) {
  if (a.dims() != b.dims()) throw ArgumentError("masks must have identical dimensions");
}

bool spacing_matches(const Vec3& a, const Vec3& b) {
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(a[i] - b[i]) > 1e-5 * std::max(std::fabs(a[i]), std::fabs(b[i]))) return false;
  }
  return true;
}

struct LabelBox {
  Index3 lo{std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max(),
            std::numeric_limits<std::size_t>::max()};
  Index3 hi{0, 0, 0};
  bool empty = true;

  void include(std::size_t x, std::size_t y, std::size_t z) {
    empty = false;
    lo = {std::min(lo[0], x), std::min(lo[1], y), std::min(lo[2], z)};
    hi = {std::max(hi[0], x), std::max(hi[1], y), std::max(hi[2], z)};
  }
};

std::string format_optional(const std::optional<double>& v) { return v ? format_full(*v) : "NA"; }

std::optional<double> parse_optional(const std::string& text, const std::string& what) {
  if (text == "NA") return std::nullopt;
  return parse_double(text, what);
}

}  // namespace

std::optional<double> dice(const Mask& a, const Mask& b) {
  check_same_dims(a, b);
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t both = 0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const bool in_a = va[i] != 0;
    const bool in_b = vb[i] != 0;
    na += in_a;
    nb += in_b;
    both += in_a && in_b;
  }
  if (na + nb == 0) return std::nullopt;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::optional<double> nsd(const SurfaceSet& a, const SurfaceSet& b, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("NSD tolerance must be positive");
  if (a.empty() && b.empty()) return std::nullopt;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t hits = count_within(a, b, tau) + count_within(b, a, tau);
  return static_cast<double>(hits) / static_cast<double>(a.size() + b.size());
}

std::optional<double> nsd(const Mask& a, const Mask& b, const Vec3& spacing, double tau) {
  check_same_dims(a, b);
  return nsd(extract_surface(a, spacing), extract_surface(b, spacing), tau);
}

std::vector<MetricRecord> evaluate_case(const LabelVolume& prediction, const LabelVolume& truth,
                                        const LabelMap& map, const EvaluationOptions& options,
                                        const std::string& case_id, const std::string& model_id) {
  if (prediction.dims() != truth.dims()) throw ArgumentError("prediction and truth dimensions differ");
  if (!spacing_matches(prediction.spacing, truth.spacing)) {
    throw ArgumentError("prediction and truth voxel spacings differ");
  }
  const Dims& d = truth.dims();
  const std::size_t n_labels = map.target_count();

  // Bounding box of each label's union over both volumes.
  std::vector<LabelBox> boxes(n_labels + 1);
  for (std::size_t z = 0; z < d[2]; ++z) {
    for (std::size_t y = 0; y < d[1]; ++y) {
      for (std::size_t x = 0; x < d[0]; ++x) {
        for (Label l : {prediction.voxels(x, y, z), truth.voxels(x, y, z)}) {
          if (l >= 1 && l <= n_labels) boxes[l].include(x, y, z);
        }
      }
    }
  }

  std::vector<MetricRecord> records;
  records.reserve(n_labels);
  for (Label l = 1; l <= n_labels; ++l) {
    MetricRecord rec{case_id, model_id, l, std::nullopt, std::nullopt};
    const LabelBox& box = boxes[l];
    if (!box.empty) {
      // Crop with a one-voxel margin so boundary tests see the same
      // neighbourhood as on the full grid.
      Index3 lo{};
      Dims cd{};
      for (int a = 0; a < 3; ++a) {
        lo[a] = box.lo[a] > 0 ? box.lo[a] - 1 : 0;
        std::size_t hi = std::min(box.hi[a] + 1, d[a] - 1);
        cd[a] = hi - lo[a] + 1;
      }
      Mask pm(cd);
      Mask tm(cd);
      for (std::size_t z = 0; z < cd[2]; ++z) {
        for (std::size_t y = 0; y < cd[1]; ++y) {
          for (std::size_t x = 0; x < cd[0]; ++x) {
            pm(x, y, z) = prediction.voxels(x + lo[0], y + lo[1], z + lo[2]) == l;
            tm(x, y, z) = truth.voxels(x + lo[0], y + lo[1], z + lo[2]) == l;
          }
        }
      }
      rec.dice = dice(pm, tm);
      rec.nsd = nsd(pm, tm, truth.spacing, options.tau_mm);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string format_metric_records(const std::vector<MetricRecord>& records) {
  std::ostringstream out;
  out << "case_id,model_id,label_id,dice,nsd\n";
  for (const auto& r : records) {
    out << r.case_id << ',' << r.model_id << ',' << r.label << ',' << format_optional(r.dice) << ','
        << format_optional(r.nsd) << '\n';
  }
  return out.str();
}

std::vector<MetricRecord> read_metric_records(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_case = table.column("case_id");
  const auto c_model = table.column("model_id");
  const auto c_label = table.column("label_id");
  const auto c_dice = table.column("dice");
  const auto c_nsd = table.column("nsd");
  std::vector<MetricRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    MetricRecord r;
    r.case_id = row[c_case];
    r.model_id = row[c_model];
    long long label = parse_int(row[c_label], table.source + ": label_id");
    if (label <= 0 || label > std::numeric_limits<Label>::max()) throw FormatError(table.source + ": bad label_id");
    r.label = static_cast<Label>(label);
    r.dice = parse_optional(row[c_dice], table.source + ": dice");
    r.nsd = parse_optional(row[c_nsd], table.source + ": nsd");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace segbench
