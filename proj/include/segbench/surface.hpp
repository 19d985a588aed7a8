#pragma once

#include <cstdint>
#include <vector>

#include "segbench/volume.hpp"

namespace segbench {

// Binary mask: any nonzero voxel is foreground.
using Mask = Grid3<std::uint8_t>;

// Centres of the foreground voxels that touch background (or the grid edge)
// through one of their six faces. Points are index * spacing in mm.
struct SurfaceSet {
  Vec3 spacing{1.0, 1.0, 1.0};
  std::vector<Index3> voxels;  // scan order, x fastest

  std::size_t size() const noexcept { return voxels.size(); }
  bool empty() const noexcept { return voxels.empty(); }
  Vec3 point(std::size_t i) const noexcept {
    return {static_cast<double>(voxels[i][0]) * spacing[0], static_cast<double>(voxels[i][1]) * spacing[1],
            static_cast<double>(voxels[i][2]) * spacing[2]};
  }
};

SurfaceSet extract_surface(const Mask& mask, const Vec3& spacing);

// Distance between two voxel centres on a grid with the given spacing,
// computed from index differences: sqrt((dx sx)^2 + (dy sy)^2 + (dz sz)^2).
double grid_distance(const Index3& a, const Index3& b, const Vec3& spacing) noexcept;

// For each query point, the Euclidean distance (mm) to the closest target
// point. Both sets must share the voxel grid spacing. Uses an exact
// separable squared EDT over the bounding box of both sets.
std::vector<double> nearest_surface_distances(const SurfaceSet& query, const SurfaceSet& target);

// Number of query points whose nearest target point lies within `tau` mm.
// Decisions within rounding distance of `tau` are settled by direct
// comparison against the nearby target points, so the count equals the
// all-pairs result.
std::size_t count_within(const SurfaceSet& query, const SurfaceSet& target, double tau);

}  // namespace segbench
