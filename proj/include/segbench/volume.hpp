#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "segbench/error.hpp"

namespace segbench {

using Dims = std::array<std::size_t, 3>;
using Index3 = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

using Label = std::uint16_t;

inline std::size_t voxel_count(const Dims& dims) { return dims[0] * dims[1] * dims[2]; }

// Dense 3D grid stored with x varying fastest (NIfTI order).
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  explicit Grid3(const Dims& dims, T fill = T{}) : dims_(dims), data_(voxel_count(dims), fill) {
    check_dims(dims);
  }
  Grid3(const Dims& dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
    check_dims(dims);
    if (data_.size() != voxel_count(dims)) {
      throw ArgumentError("grid data size does not match dimensions");
    }
  }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t offset(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_[0] * (y + dims_[1] * z);
  }
  T& operator()(std::size_t x, std::size_t y, std::size_t z) noexcept { return data_[offset(x, y, z)]; }
  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[offset(x, y, z)];
  }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool operator==(const Grid3&) const = default;

 private:
  static void check_dims(const Dims& dims) {
    for (auto d : dims) {
      if (d == 0) throw ArgumentError("grid dimensions must be >= 1 on every axis");
    }
  }

  Dims dims_{0, 0, 0};
  std::vector<T> data_;
};

// A voxel grid placed in physical space. Axis-aligned: spacing is mm per
// axis, origin is the mm position of voxel (0,0,0).
template <typename T>
struct Volume {
  Grid3<T> voxels;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  const Dims& dims() const noexcept { return voxels.dims(); }
  bool operator==(const Volume&) const = default;
};

using ImageVolume = Volume<float>;
using LabelVolume = Volume<Label>;

inline void check_spacing(const Vec3& spacing) {
  for (double s : spacing) {
    if (!(s > 0.0)) throw ArgumentError("spacing must be positive on every axis");
  }
}

}  // namespace segbench
