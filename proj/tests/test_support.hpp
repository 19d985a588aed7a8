#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "segbench/surface.hpp"
#include "segbench/volume.hpp"

namespace segbench::testing {

inline std::filesystem::path source_dir() { return SEGBENCH_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "tests" / "data"; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("segbench-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Mask random_mask(std::mt19937_64& rng, const Dims& dims, double density) {
  std::bernoulli_distribution on(density);
  Mask m(dims);
  for (auto& v : m.values()) v = on(rng) ? 1 : 0;
  return m;
}

// A random blob: voxels within a random ellipsoid, with some noise flips.
inline Mask random_blob(std::mt19937_64& rng, const Dims& dims) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mask m(dims);
  double c[3], r[3];
  for (int a = 0; a < 3; ++a) {
    c[a] = u(rng) * static_cast<double>(dims[a]);
    r[a] = 0.5 + u(rng) * static_cast<double>(dims[a]) / 2.0;
  }
  const double flip = 0.05 * u(rng);
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const double dx = (x - c[0]) / r[0], dy = (y - c[1]) / r[1], dz = (z - c[2]) / r[2];
        bool in = dx * dx + dy * dy + dz * dz <= 1.0;
        if (u(rng) < flip) in = !in;
        m(x, y, z) = in ? 1 : 0;
      }
  return m;
}

// Oracle implementations used only by tests: plain voxel loops, no shared
// code with the engine beyond the grid container.
inline std::optional<double> oracle_dice(const Mask& a, const Mask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] != 0;
    nb += b[i] != 0;
    both += a[i] != 0 && b[i] != 0;
  }
  if (na + nb == 0) return std::nullopt;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

inline std::vector<Index3> oracle_surface(const Mask& m) {
  const auto& d = m.dims();
  std::vector<Index3> out;
  auto fg = [&](long x, long y, long z) {
    if (x < 0 || y < 0 || z < 0 || x >= static_cast<long>(d[0]) || y >= static_cast<long>(d[1]) ||
        z >= static_cast<long>(d[2]))
      return false;
    return m(x, y, z) != 0;
  };
  for (long z = 0; z < static_cast<long>(d[2]); ++z)
    for (long y = 0; y < static_cast<long>(d[1]); ++y)
      for (long x = 0; x < static_cast<long>(d[0]); ++x) {
        if (!fg(x, y, z)) continue;
        if (!fg(x - 1, y, z) || !fg(x + 1, y, z) || !fg(x, y - 1, z) || !fg(x, y + 1, z) || !fg(x, y, z - 1) ||
            !fg(x, y, z + 1))
          out.push_back({static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z)});
      }
  return out;
}

inline double oracle_distance(const Index3& p, const Index3& q, const Vec3& s) {
  const double dx = (static_cast<double>(p[0]) - static_cast<double>(q[0])) * s[0];
  const double dy = (static_cast<double>(p[1]) - static_cast<double>(q[1])) * s[1];
  const double dz = (static_cast<double>(p[2]) - static_cast<double>(q[2])) * s[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline std::vector<double> oracle_nearest(const std::vector<Index3>& query, const std::vector<Index3>& target,
                                          const Vec3& s) {
  std::vector<double> out;
  for (const auto& p : query) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : target) best = std::min(best, oracle_distance(p, q, s));
    out.push_back(best);
  }
  return out;
}

inline std::optional<double> oracle_nsd(const Mask& a, const Mask& b, const Vec3& s, double tau) {
  const auto sa = oracle_surface(a), sb = oracle_surface(b);
  if (sa.empty() && sb.empty()) return std::nullopt;
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t hits = 0;
  for (double d : oracle_nearest(sa, sb, s)) hits += d <= tau;
  for (double d : oracle_nearest(sb, sa, s)) hits += d <= tau;
  return static_cast<double>(hits) / static_cast<double>(sa.size() + sb.size());
}

}  // namespace segbench::testing
