#include "segbench/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace segbench {

namespace {

std::string format_index(const Index3& i) {
  return "(" + std::to_string(i[0]) + "," + std::to_string(i[1]) + "," + std::to_string(i[2]) + ")";
}

}  // namespace

std::vector<std::size_t> axis_origins(std::size_t extent, std::size_t patch_size, std::size_t stride) {
  if (patch_size == 0 || stride == 0) throw ArgumentError("patch size and stride must be positive");
  if (extent < patch_size) throw ArgumentError("axis extent is smaller than the patch; pad first");
  std::vector<std::size_t> origins;
  std::size_t o = 0;
  for (; o + patch_size < extent; o += stride) origins.push_back(o);
  const std::size_t last = extent - patch_size;
  if (origins.empty() || origins.back() != last) origins.push_back(last);
  return origins;
}

WindowGrid make_windows(const Dims& volume_dims, std::size_t patch_size, double overlap) {
  if (patch_size == 0) throw ArgumentError("patch size must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ArgumentError("overlap must lie in [0, 1)");
  for (auto d : volume_dims) {
    if (d == 0) throw ArgumentError("volume dimensions must be >= 1");
  }
  WindowGrid grid;
  grid.volume_dims = volume_dims;
  grid.patch_size = patch_size;
  grid.overlap = overlap;
  grid.stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(static_cast<double>(patch_size) * (1.0 - overlap))));
  std::array<std::vector<std::size_t>, 3> per_axis;
  for (int a = 0; a < 3; ++a) {
    grid.padded_dims[a] = std::max(volume_dims[a], patch_size);
    grid.pad_before[a] = (grid.padded_dims[a] - volume_dims[a]) / 2;
    per_axis[a] = axis_origins(grid.padded_dims[a], patch_size, grid.stride);
  }
  for (auto x : per_axis[0]) {
    for (auto y : per_axis[1]) {
      for (auto z : per_axis[2]) grid.origins.push_back({x, y, z});
    }
  }
  return grid;
}

GaussianImportance::GaussianImportance(std::size_t patch_size, double sigma_coeff, double floor)
    : patch_size_(patch_size), sigma_coeff_(sigma_coeff) {
  if (patch_size == 0) throw ArgumentError("patch size must be positive");
  if (!(sigma_coeff > 0.0)) throw ArgumentError("sigma coefficient must be positive");
  const double sigma = sigma_coeff * static_cast<double>(patch_size);
  const double c = static_cast<double>(patch_size / 2);
  // Separable: the 3D weight is the product of three 1D Gaussians.
  std::vector<double> g(patch_size);
  for (std::size_t i = 0; i < patch_size; ++i) {
    double d = static_cast<double>(i) - c;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  weights_.resize(patch_size * patch_size * patch_size);
  for (std::size_t z = 0; z < patch_size; ++z) {
    for (std::size_t y = 0; y < patch_size; ++y) {
      for (std::size_t x = 0; x < patch_size; ++x) {
        weights_[x + patch_size * (y + patch_size * z)] = std::max(g[x] * g[y] * g[z], floor);
      }
    }
  }
}

GaussianImportance gaussian_weights(std::size_t patch_size, double sigma_coeff) {
  return GaussianImportance(patch_size, sigma_coeff);
}

ScorePatch::ScorePatch(const Index3& origin_, std::size_t classes_, std::size_t patch_size_, float fill)
    : origin(origin_), classes(classes_), patch_size(patch_size_),
      scores(classes_ * patch_size_ * patch_size_ * patch_size_, fill) {}

FusionAccumulator::FusionAccumulator(const Dims& volume_dims, std::size_t classes,
                                     const GaussianImportance& importance)
    : frame_(make_windows(volume_dims, importance.patch_size(), 0.0)),
      classes_(classes),
      importance_(importance) {
  if (classes == 0) throw ArgumentError("fusion needs at least one class");
  frame_.origins.clear();
  const std::size_t n = voxel_count(frame_.padded_dims);
  weight_sum_.assign(n, 0.0);
  score_sum_.assign(n * classes, 0.0);
}

void FusionAccumulator::add(const ScorePatch& patch) {
  const std::size_t d = importance_.patch_size();
  if (patch.classes != classes_) throw ArgumentError("score patch class count mismatch");
  if (patch.patch_size != d) throw ArgumentError("score patch size does not match the importance map");
  if (patch.scores.size() != classes_ * patch.block()) throw ArgumentError("score patch data size mismatch");
  for (int a = 0; a < 3; ++a) {
    if (patch.origin[a] + d > frame_.padded_dims[a]) {
      throw ArgumentError("window at " + format_index(patch.origin) + " does not fit the volume");
    }
  }
  if (!frame_.origins.empty() && !(frame_.origins.back() < patch.origin)) {
    throw ArgumentError("score patches must be added in increasing origin order (window " +
                        format_index(patch.origin) + ")");
  }
  frame_.origins.push_back(patch.origin);

  const Dims& pd = frame_.padded_dims;
  const std::size_t n = voxel_count(pd);
  const auto [ox, oy, oz] = patch.origin;
  for (std::size_t z = 0; z < d; ++z) {
    for (std::size_t y = 0; y < d; ++y) {
      const std::size_t row = ox + pd[0] * ((oy + y) + pd[1] * (oz + z));
      for (std::size_t x = 0; x < d; ++x) {
        const double w = importance_(x, y, z);
        weight_sum_[row + x] += w;
        for (std::size_t c = 0; c < classes_; ++c) {
          score_sum_[c * n + row + x] += w * static_cast<double>(patch.at(c, x, y, z));
        }
      }
    }
  }
}

FusedVolume FusionAccumulator::finish(bool keep_scores) const {
  const Dims& vd = frame_.volume_dims;
  const Dims& pd = frame_.padded_dims;
  const Dims& lo = frame_.pad_before;
  const std::size_t n_padded = voxel_count(pd);
  FusedVolume out{Grid3<Label>(vd), classes_, std::nullopt};
  if (keep_scores) out.scores.emplace(classes_ * voxel_count(vd));
  const std::size_t n_out = voxel_count(vd);
  for (std::size_t z = 0; z < vd[2]; ++z) {
    for (std::size_t y = 0; y < vd[1]; ++y) {
      for (std::size_t x = 0; x < vd[0]; ++x) {
        const std::size_t src = (x + lo[0]) + pd[0] * ((y + lo[1]) + pd[1] * (z + lo[2]));
        const std::size_t dst = out.labels.offset(x, y, z);
        const double wsum = weight_sum_[src];
        if (!(wsum > 0.0)) {
          throw InternalError("fusion coverage violated: no window covers voxel " + format_index({x, y, z}));
        }
        std::size_t best = 0;
        double best_score = score_sum_[src] / wsum;
        if (keep_scores) (*out.scores)[dst] = best_score;
        for (std::size_t c = 1; c < classes_; ++c) {
          const double s = score_sum_[c * n_padded + src] / wsum;
          if (keep_scores) (*out.scores)[c * n_out + dst] = s;
          if (s > best_score) {
            best_score = s;
            best = c;
          }
        }
        out.labels[dst] = static_cast<Label>(best);
      }
    }
  }
  return out;
}

FusedVolume fuse(std::span<const ScorePatch> patches, const GaussianImportance& importance,
                 const Dims& volume_dims, bool keep_scores) {
  if (patches.empty()) throw ArgumentError("no score patches to fuse");
  std::vector<std::size_t> order(patches.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return patches[a].origin < patches[b].origin; });
  FusionAccumulator acc(volume_dims, patches.front().classes, importance);
  for (auto i : order) acc.add(patches[i]);
  return acc.finish(keep_scores);
}

}  // namespace segbench
