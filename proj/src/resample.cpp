#include "segbench/resample.hpp"

#include <algorithm>
#include <cmath>

namespace segbench {

namespace {

// Continuous input index sampled by each output index along one axis.
struct AxisMap {
  std::vector<double> position;  // clamped to [0, n_in - 1]
};

AxisMap map_axis(std::size_t n_in, double s_in, std::size_t n_out, double s_out) {
  AxisMap map;
  map.position.resize(n_out);
  const double c_in = (static_cast<double>(n_in) - 1.0) / 2.0;
  const double c_out = (static_cast<double>(n_out) - 1.0) / 2.0;
  const double ratio = s_out / s_in;
  const double hi = static_cast<double>(n_in) - 1.0;
  for (std::size_t i = 0; i < n_out; ++i) {
    double x = c_in + (static_cast<double>(i) - c_out) * ratio;
    map.position[i] = std::clamp(x, 0.0, hi);
  }
  return map;
}

Vec3 shifted_origin(const Vec3& origin, const Dims& in, const Vec3& s_in, const Dims& out, const Vec3& s_out) {
  Vec3 o{};
  for (int a = 0; a < 3; ++a) {
    double c_in = (static_cast<double>(in[a]) - 1.0) / 2.0;
    double c_out = (static_cast<double>(out[a]) - 1.0) / 2.0;
    o[a] = origin[a] + c_in * s_in[a] - c_out * s_out[a];
  }
  return o;
}

std::size_t round_index(double x) { return static_cast<std::size_t>(std::round(x)); }

template <typename T>
Volume<T> resample_nearest(const Volume<T>& volume, const Vec3& target) {
  const Dims in = volume.dims();
  const Dims out = resampled_dims(in, volume.spacing, target);
  AxisMap mx = map_axis(in[0], volume.spacing[0], out[0], target[0]);
  AxisMap my = map_axis(in[1], volume.spacing[1], out[1], target[1]);
  AxisMap mz = map_axis(in[2], volume.spacing[2], out[2], target[2]);
  Grid3<T> grid(out);
  for (std::size_t z = 0; z < out[2]; ++z) {
    std::size_t iz = round_index(mz.position[z]);
    for (std::size_t y = 0; y < out[1]; ++y) {
      std::size_t iy = round_index(my.position[y]);
      for (std::size_t x = 0; x < out[0]; ++x) {
        grid(x, y, z) = volume.voxels(round_index(mx.position[x]), iy, iz);
      }
    }
  }
  return Volume<T>{std::move(grid), target, shifted_origin(volume.origin, in, volume.spacing, out, target)};
}

struct Lerp {
  std::size_t lo;
  std::size_t hi;
  double t;
};

// Exact when a == b, so constant regions stay constant.
double lerp(double a, double b, double t) { return a + t * (b - a); }

std::vector<Lerp> lerp_axis(const AxisMap& map, std::size_t n_in) {
  std::vector<Lerp> out;
  out.reserve(map.position.size());
  for (double x : map.position) {
    auto lo = static_cast<std::size_t>(std::floor(x));
    std::size_t hi = std::min(lo + 1, n_in - 1);
    out.push_back({lo, hi, x - static_cast<double>(lo)});
  }
  return out;
}

}  // namespace

Dims resampled_dims(const Dims& dims, const Vec3& spacing, const Vec3& target_spacing) {
  check_spacing(spacing);
  check_spacing(target_spacing);
  Dims out{};
  for (int a = 0; a < 3; ++a) {
    // std::round rounds half away from zero.
    double extent = std::round(static_cast<double>(dims[a]) * spacing[a] / target_spacing[a]);
    out[a] = std::max<std::size_t>(1, static_cast<std::size_t>(extent));
  }
  return out;
}

ImageVolume resample(const ImageVolume& volume, const Vec3& target_spacing, Interpolation mode) {
  if (mode == Interpolation::nearest) return resample_nearest(volume, target_spacing);
  const Dims in = volume.dims();
  const Dims out = resampled_dims(in, volume.spacing, target_spacing);
  auto lx = lerp_axis(map_axis(in[0], volume.spacing[0], out[0], target_spacing[0]), in[0]);
  auto ly = lerp_axis(map_axis(in[1], volume.spacing[1], out[1], target_spacing[1]), in[1]);
  auto lz = lerp_axis(map_axis(in[2], volume.spacing[2], out[2], target_spacing[2]), in[2]);
  const auto& v = volume.voxels;
  Grid3<float> grid(out);
  for (std::size_t z = 0; z < out[2]; ++z) {
    const Lerp& cz = lz[z];
    for (std::size_t y = 0; y < out[1]; ++y) {
      const Lerp& cy = ly[y];
      for (std::size_t x = 0; x < out[0]; ++x) {
        const Lerp& cx = lx[x];
        auto edge = [&](std::size_t yy, std::size_t zz) {
          return lerp(v(cx.lo, yy, zz), v(cx.hi, yy, zz), cx.t);
        };
        double c0 = lerp(edge(cy.lo, cz.lo), edge(cy.hi, cz.lo), cy.t);
        double c1 = lerp(edge(cy.lo, cz.hi), edge(cy.hi, cz.hi), cy.t);
        grid(x, y, z) = static_cast<float>(lerp(c0, c1, cz.t));
      }
    }
  }
  return ImageVolume{std::move(grid), target_spacing,
                     shifted_origin(volume.origin, in, volume.spacing, out, target_spacing)};
}

LabelVolume resample(const LabelVolume& volume, const Vec3& target_spacing, Interpolation mode) {
  if (mode != Interpolation::nearest) {
    throw ArgumentError("label volumes must be resampled with nearest-neighbour interpolation");
  }
  return resample_nearest(volume, target_spacing);
}

}  // namespace segbench
