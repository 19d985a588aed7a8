#include "segbench/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional lower envelope of parabolas (Felzenszwalb & Huttenlocher),
// with sample pitch `step`. `f` holds squared distances (inf = no site) with
// the given stride; it is overwritten with the transformed line.
void edt_line(double* f, std::size_t n, std::size_t stride, double step, std::vector<double>& line,
              std::vector<std::size_t>& v, std::vector<double>& z) {
  line.resize(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = f[i * stride];
  v.resize(n);
  z.resize(n + 1);
  const double step2 = step * step;
  std::size_t k = 0;
  bool any = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (line[q] == kInf) continue;
    if (!any) {
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      any = true;
      continue;
    }
    const auto qd = static_cast<double>(q);
    double s = 0.0;
    while (true) {
      const auto vd = static_cast<double>(v[k]);
      s = ((line[q] - line[v[k]]) / step2 + qd * qd - vd * vd) / (2.0 * (qd - vd));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      // k == 0: the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (!any) return;
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double d = static_cast<double>(static_cast<long long>(q) - static_cast<long long>(v[k])) * step;
    f[q * stride] = d * d + line[v[k]];
  }
}

struct Box {
  Index3 lo{};
  Dims dims{};
};

Box bounding_box(const SurfaceSet& a, const SurfaceSet& b) {
  Index3 lo{std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max(),
            std::numeric_limits<std::size_t>::max()};
  Index3 hi{0, 0, 0};
  for (const auto* set : {&a, &b}) {
    for (const auto& p : set->voxels) {
      for (int ax = 0; ax < 3; ++ax) {
        lo[ax] = std::min(lo[ax], p[ax]);
        hi[ax] = std::max(hi[ax], p[ax]);
      }
    }
  }
  Box box;
  box.lo = lo;
  for (int ax = 0; ax < 3; ++ax) box.dims[ax] = hi[ax] - lo[ax] + 1;
  return box;
}

// Squared EDT of the target sites over the box.
struct TargetField {
  Box box;
  Grid3<double> sq;
  Grid3<std::uint8_t> site;

  std::size_t offset(const Index3& p) const {
    return sq.offset(p[0] - box.lo[0], p[1] - box.lo[1], p[2] - box.lo[2]);
  }
};

void check_same_grid(const SurfaceSet& a, const SurfaceSet& b) {
  if (a.spacing != b.spacing) throw ArgumentError("surface sets must share the voxel spacing");
}

TargetField target_field(const SurfaceSet& query, const SurfaceSet& target) {
  TargetField field;
  field.box = bounding_box(query, target);
  field.sq = Grid3<double>(field.box.dims, kInf);
  field.site = Grid3<std::uint8_t>(field.box.dims, 0);
  for (const auto& p : target.voxels) {
    auto o = field.offset(p);
    field.sq[o] = 0.0;
    field.site[o] = 1;
  }
  const Dims& d = field.box.dims;
  std::vector<double> line;
  std::vector<std::size_t> v;
  std::vector<double> z;
  double* data = field.sq.values().data();
  for (std::size_t zz = 0; zz < d[2]; ++zz) {
    for (std::size_t y = 0; y < d[1]; ++y) edt_line(data + field.sq.offset(0, y, zz), d[0], 1, target.spacing[0], line, v, z);
  }
  for (std::size_t zz = 0; zz < d[2]; ++zz) {
    for (std::size_t x = 0; x < d[0]; ++x) edt_line(data + field.sq.offset(x, 0, zz), d[1], d[0], target.spacing[1], line, v, z);
  }
  for (std::size_t y = 0; y < d[1]; ++y) {
    for (std::size_t x = 0; x < d[0]; ++x) {
      edt_line(data + field.sq.offset(x, y, 0), d[2], d[0] * d[1], target.spacing[2], line, v, z);
    }
  }
  return field;
}

// Exact check of min distance <= tau by scanning target sites near `q`.
bool within_exact(const TargetField& field, const Index3& q, const Vec3& spacing, double tau) {
  Index3 lo{};
  Index3 hi{};
  for (int a = 0; a < 3; ++a) {
    auto r = static_cast<std::size_t>(std::floor(tau / spacing[a])) + 1;
    std::size_t rel = q[a] - field.box.lo[a];
    lo[a] = rel > r ? rel - r : 0;
    hi[a] = std::min(rel + r, field.box.dims[a] - 1);
  }
  for (std::size_t z = lo[2]; z <= hi[2]; ++z) {
    for (std::size_t y = lo[1]; y <= hi[1]; ++y) {
      for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
        if (!field.site(x, y, z)) continue;
        Index3 t{x + field.box.lo[0], y + field.box.lo[1], z + field.box.lo[2]};
        if (grid_distance(q, t, spacing) <= tau) return true;
      }
    }
  }
  return false;
}

}  // namespace

SurfaceSet extract_surface(const Mask& mask, const Vec3& spacing) {
  check_spacing(spacing);
  SurfaceSet surface;
  surface.spacing = spacing;
  const Dims& d = mask.dims();
  for (std::size_t z = 0; z < d[2]; ++z) {
    for (std::size_t y = 0; y < d[1]; ++y) {
      for (std::size_t x = 0; x < d[0]; ++x) {
        if (!mask(x, y, z)) continue;
        bool boundary = x == 0 || y == 0 || z == 0 || x + 1 == d[0] || y + 1 == d[1] || z + 1 == d[2] ||
                        !mask(x - 1, y, z) || !mask(x + 1, y, z) || !mask(x, y - 1, z) ||
                        !mask(x, y + 1, z) || !mask(x, y, z - 1) || !mask(x, y, z + 1);
        if (boundary) surface.voxels.push_back({x, y, z});
      }
    }
  }
  return surface;
}

double grid_distance(const Index3& a, const Index3& b, const Vec3& spacing) noexcept {
  auto diff = [&](int ax) {
    return static_cast<double>(static_cast<long long>(a[ax]) - static_cast<long long>(b[ax])) * spacing[ax];
  };
  const double dx = diff(0);
  const double dy = diff(1);
  const double dz = diff(2);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<double> nearest_surface_distances(const SurfaceSet& query, const SurfaceSet& target) {
  if (target.empty()) throw ArgumentError("nearest surface distance needs a nonempty target");
  check_same_grid(query, target);
  std::vector<double> out;
  if (query.empty()) return out;
  const auto field = target_field(query, target);
  out.reserve(query.size());
  for (const auto& p : query.voxels) out.push_back(std::sqrt(field.sq[field.offset(p)]));
  return out;
}

std::size_t count_within(const SurfaceSet& query, const SurfaceSet& target, double tau) {
  if (target.empty() || query.empty()) return 0;
  check_same_grid(query, target);
  const auto field = target_field(query, target);
  const double band = 1e-9 * std::max(tau, 1.0);
  std::size_t count = 0;
  for (const auto& p : query.voxels) {
    const double d = std::sqrt(field.sq[field.offset(p)]);
    if (std::fabs(d - tau) <= band) {
      count += within_exact(field, p, query.spacing, tau) ? 1 : 0;
    } else {
      count += d <= tau ? 1 : 0;
    }
  }
  return count;
}

}  // namespace segbench
