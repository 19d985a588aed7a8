#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "segbench/volume.hpp"

namespace segbench {

// Sliding-window layout over a volume. Axes shorter than the patch are
// zero-padded symmetrically first; origins live in that padded frame.
struct WindowGrid {
  Dims volume_dims{};
  Dims padded_dims{};
  Dims pad_before{};
  std::size_t patch_size = 0;
  double overlap = 0.0;
  std::size_t stride = 0;
  std::vector<Index3> origins;  // lexicographic (x, then y, then z)
};

WindowGrid make_windows(const Dims& volume_dims, std::size_t patch_size = 96, double overlap = 0.5);

// Axis origins for one dimension: multiples of the stride, plus a final
// window clamped flush to the far boundary.
std::vector<std::size_t> axis_origins(std::size_t extent, std::size_t patch_size, std::size_t stride);

class GaussianImportance {
 public:
  GaussianImportance(std::size_t patch_size, double sigma_coeff, double floor = 1e-6);

  std::size_t patch_size() const noexcept { return patch_size_; }
  double sigma_coeff() const noexcept { return sigma_coeff_; }
  double sigma() const noexcept { return sigma_coeff_ * static_cast<double>(patch_size_); }
  // Peak voxel index on every axis.
  std::size_t center() const noexcept { return patch_size_ / 2; }

  double operator()(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return weights_[x + patch_size_ * (y + patch_size_ * z)];
  }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::size_t patch_size_;
  double sigma_coeff_;
  std::vector<double> weights_;
};

// exp(-|x - c|^2 / (2 sigma^2)), sigma = sigma_coeff * patch_size, with
// c = patch_size / 2 on every axis; peak 1, floored at 1e-6.
GaussianImportance gaussian_weights(std::size_t patch_size = 96, double sigma_coeff = 0.125);

// Per-class scores for one window. Layout: class-major, then z, y, x with
// x varying fastest.
struct ScorePatch {
  Index3 origin{0, 0, 0};
  std::size_t classes = 0;
  std::size_t patch_size = 0;
  std::vector<float> scores;

  ScorePatch() = default;
  ScorePatch(const Index3& origin, std::size_t classes, std::size_t patch_size, float fill = 0.0f);

  std::size_t block() const noexcept { return patch_size * patch_size * patch_size; }
  float& at(std::size_t c, std::size_t x, std::size_t y, std::size_t z) noexcept {
    return scores[c * block() + x + patch_size * (y + patch_size * z)];
  }
  float at(std::size_t c, std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return scores[c * block() + x + patch_size * (y + patch_size * z)];
  }
  bool operator==(const ScorePatch&) const = default;
};

struct FusedVolume {
  Grid3<Label> labels;
  std::size_t classes = 0;
  // Class-major fused scores over the (unpadded) volume when requested.
  std::optional<std::vector<double>> scores;

  double score(std::size_t c, std::size_t voxel) const { return (*scores)[c * labels.size() + voxel]; }
};

// Accumulates Gaussian-weighted window scores and normalises by the summed
// weights; labels are the per-voxel argmax (lowest class index on ties).
// Patches must arrive in strictly increasing lexicographic origin order,
// which fixes the per-voxel summation order.
class FusionAccumulator {
 public:
  FusionAccumulator(const Dims& volume_dims, std::size_t classes, const GaussianImportance& importance);

  const WindowGrid& frame() const noexcept { return frame_; }
  void add(const ScorePatch& patch);
  // Throws InternalError naming the first voxel no window covered.
  FusedVolume finish(bool keep_scores = false) const;

 private:
  WindowGrid frame_;
  std::size_t classes_;
  const GaussianImportance& importance_;
  std::vector<double> weight_sum_;
  std::vector<double> score_sum_;
};

// Sorts the patches by origin before accumulating, so the result is
// bitwise independent of the order they are supplied in.
FusedVolume fuse(std::span<const ScorePatch> patches, const GaussianImportance& importance,
                 const Dims& volume_dims, bool keep_scores = false);

}  // namespace segbench
