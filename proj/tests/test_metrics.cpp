#include <doctest.h>

#include <algorithm>

#include "segbench/aggregate.hpp"
#include "segbench/metrics.hpp"
#include "segbench/surface.hpp"
#include "test_support.hpp"

using namespace segbench;
using namespace segbench::testing;

namespace {

Mask point_mask(const Dims& d, std::initializer_list<Index3> points) {
  Mask m(d);
  for (const auto& p : points) m(p[0], p[1], p[2]) = 1;
  return m;
}

// Axis flip followed by an x/z transpose.
Mask flip_transpose(const Mask& m) {
  const auto& d = m.dims();
  Mask out(Dims{d[2], d[1], d[0]});
  for (std::size_t z = 0; z < d[2]; ++z)
    for (std::size_t y = 0; y < d[1]; ++y)
      for (std::size_t x = 0; x < d[0]; ++x) out(z, d[1] - 1 - y, x) = m(x, y, z);
  return out;
}

const LabelMap& small_map() {
  static const LabelMap map({{1, 1}, {2, 2}, {3, 3}, {4, 4}},
                            {{1, "a", LabelGroup::btcv},
                             {2, "b", LabelGroup::btcv},
                             {3, "c", LabelGroup::surgical},
                             {4, "d", LabelGroup::surgical}});
  return map;
}

}  // namespace

TEST_CASE("surface: single voxel, solid cube and empty mask") {
  const Vec3 unit{1.0, 1.0, 1.0};
  auto single = extract_surface(point_mask({5, 5, 5}, {{2, 3, 1}}), unit);
  REQUIRE(single.size() == 1);
  CHECK(single.voxels[0] == Index3{2, 3, 1});

  Mask cube(Dims{5, 5, 5});
  for (std::size_t z = 1; z < 4; ++z)
    for (std::size_t y = 1; y < 4; ++y)
      for (std::size_t x = 1; x < 4; ++x) cube(x, y, z) = 1;
  auto s = extract_surface(cube, unit);
  CHECK(s.size() == 26);
  CHECK(std::find(s.voxels.begin(), s.voxels.end(), Index3{2, 2, 2}) == s.voxels.end());

  CHECK(extract_surface(Mask(Dims{4, 4, 4}), unit).empty());

  // Voxels on the grid edge count as boundary.
  CHECK(extract_surface(Mask(Dims{3, 3, 3}, 1), unit).size() == 26);
  auto spaced = extract_surface(point_mask({3, 3, 3}, {{1, 2, 0}}), {0.5, 2.0, 3.0});
  CHECK(spaced.point(0) == Vec3{0.5, 4.0, 0.0});
}

TEST_CASE("surface: matches the brute-force boundary oracle (property)") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_mask(rng, {dim(rng), dim(rng), dim(rng)}, 0.6);
    CHECK(extract_surface(m, {1.0, 1.0, 1.0}).voxels == oracle_surface(m));
  }
}

TEST_CASE("dice: hand examples") {
  const Dims d{4, 1, 1};
  const auto a = point_mask(d, {{0, 0, 0}, {1, 0, 0}});
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(a, point_mask(d, {{2, 0, 0}})) == 0.0);
  CHECK(*dice(a, point_mask(d, {{1, 0, 0}})) == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(dice(Mask(d), Mask(d)));
  CHECK_THROWS_AS(dice(a, Mask(Dims{2, 2, 1})), ArgumentError);
}

TEST_CASE("nearest surface distances: hand examples and brute force") {
  const Vec3 unit{1.0, 1.0, 1.0};
  std::mt19937_64 blob_rng(2);
  auto s = extract_surface(random_blob(blob_rng, {9, 9, 9}), unit);
  for (double v : nearest_surface_distances(s, s)) CHECK(v == 0.0);

  auto p = extract_surface(point_mask({8, 1, 1}, {{1, 0, 0}}), unit);
  auto q = extract_surface(point_mask({8, 1, 1}, {{5, 0, 0}}), unit);
  CHECK(nearest_surface_distances(p, q) == std::vector<double>{4.0});
  CHECK_THROWS_AS(nearest_surface_distances(p, SurfaceSet{unit, {}}), ArgumentError);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> sp(0.4, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 spacing{sp(rng), sp(rng), sp(rng)};
    const auto a = random_mask(rng, {12, 12, 12}, 0.3), b = random_blob(rng, {12, 12, 12});
    const auto sa = extract_surface(a, spacing), sb = extract_surface(b, spacing);
    if (sb.empty()) continue;
    const auto got = nearest_surface_distances(sa, sb);
    const auto want = oracle_nearest(sa.voxels, sb.voxels, spacing);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("nsd: hand examples") {
  const Vec3 two{2.0, 2.0, 2.0};
  const Dims d{5, 1, 1};
  const auto a = point_mask(d, {{0, 0, 0}});
  CHECK(nsd(a, point_mask(d, {{2, 0, 0}}), two) == 0.0);  // 4 mm apart
  CHECK(nsd(a, point_mask(d, {{1, 0, 0}}), two) == 1.0);  // 2 mm apart
  CHECK(nsd(Mask(d), a, two) == 0.0);
  CHECK(nsd(a, Mask(d), two) == 0.0);
  CHECK_FALSE(nsd(Mask(d), Mask(d), two));
  CHECK(nsd(a, a, two) == 1.0);
  CHECK_THROWS_AS(nsd(a, a, two, 0.0), ArgumentError);
  CHECK_THROWS_AS(nsd(a, Mask(Dims{4, 1, 1}), two), ArgumentError);
  // Exactly at the tolerance counts as within.
  CHECK(nsd(a, point_mask(d, {{3, 0, 0}}), {1.0, 1.0, 1.0}, 3.0) == 1.0);
}

TEST_CASE("dice and nsd: oracle agreement, symmetry, self-match, spatial and tau monotonicity (property)") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> dim(1, 14);
  std::uniform_real_distribution<double> sp(0.5, 2.5), tau(0.5, 6.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Dims d{dim(rng), dim(rng), dim(rng)};
    const Vec3 spacing{sp(rng), sp(rng), sp(rng)};
    const Mask a = trial % 2 ? random_blob(rng, d) : random_mask(rng, d, 0.3);
    const Mask b = trial % 3 ? random_blob(rng, d) : random_mask(rng, d, 0.5);
    const double t = tau(rng);

    CHECK(dice(a, b) == oracle_dice(a, b));
    const auto n = nsd(a, b, spacing, t);
    const auto want = oracle_nsd(a, b, spacing, t);
    REQUIRE(n.has_value() == want.has_value());
    if (n) CHECK(std::fabs(*n - *want) <= 1e-9);

    CHECK(dice(b, a) == dice(a, b));
    CHECK(nsd(b, a, spacing, t) == n);
    if (std::any_of(a.values().begin(), a.values().end(), [](auto v) { return v != 0; })) {
      CHECK(dice(a, a) == 1.0);
      CHECK(nsd(a, a, spacing, t) == 1.0);
    }
    const Vec3 swapped{spacing[2], spacing[1], spacing[0]};
    CHECK(dice(flip_transpose(a), flip_transpose(b)) == dice(a, b));
    CHECK(nsd(flip_transpose(a), flip_transpose(b), swapped, t) == n);
    if (n) CHECK(*nsd(a, b, spacing, t + 0.7) >= *n);
  }
}

TEST_CASE("evaluate_case: perfect, empty and random label volumes") {
  std::mt19937_64 rng(5);
  const auto& map = small_map();
  LabelVolume truth{Grid3<Label>(Dims{16, 16, 16}), {2.0, 1.5, 1.0}};
  for (auto& v : truth.voxels.values()) v = static_cast<Label>(rng() % 4);  // label 4 absent

  auto same = evaluate_case(truth, truth, map, {}, "c1", "m");
  REQUIRE(same.size() == 4);
  for (const auto& r : same) {
    CHECK(r.case_id == "c1");
    if (r.label == 4) {
      CHECK_FALSE(r.dice);
      CHECK_FALSE(r.nsd);
    } else {
      CHECK(r.dice == 1.0);
      CHECK(r.nsd == 1.0);
    }
  }

  LabelVolume empty{Grid3<Label>(truth.dims()), truth.spacing};
  for (const auto& r : evaluate_case(empty, truth, map)) {
    if (r.label != 4) CHECK(r.dice == 0.0);
  }

  LabelVolume pred = truth;
  for (auto& v : pred.voxels.values()) {
    if (rng() % 5 == 0) v = static_cast<Label>(rng() % 5);
  }
  for (const auto& r : evaluate_case(pred, truth, map, {3.0})) {
    Mask p(truth.dims()), t(truth.dims());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = pred.voxels[i] == r.label;
      t[i] = truth.voxels[i] == r.label;
    }
    CHECK(r.dice == oracle_dice(p, t));
    const auto want = oracle_nsd(p, t, truth.spacing, 3.0);
    REQUIRE(r.nsd.has_value() == want.has_value());
    if (want) CHECK(std::fabs(*r.nsd - *want) <= 1e-9);
  }

  LabelVolume other_spacing{pred.voxels, {2.0, 1.5, 1.1}};
  CHECK_THROWS_AS(evaluate_case(other_spacing, truth, map), ArgumentError);
  LabelVolume other_dims{Grid3<Label>(Dims{16, 16, 15}), truth.spacing};
  CHECK_THROWS_AS(evaluate_case(other_dims, truth, map), ArgumentError);
}

TEST_CASE("metric records: CSV round trip with NA") {
  TempDir dir;
  std::vector<MetricRecord> records{{"c1", "m1", 1, 0.5, 1.0 / 3.0}, {"c1", "m1", 2, std::nullopt, std::nullopt},
                                    {"c2", "m2", 3, 0.0, 0.0}};
  write_file(dir / "m.csv", format_metric_records(records));
  CHECK(read_file(dir / "m.csv").rfind("case_id,model_id,label_id,dice,nsd\n", 0) == 0);
  CHECK(read_metric_records(dir / "m.csv") == records);
}

TEST_CASE("aggregate: hand statistics, scopes and undefined values") {
  const auto& map = small_map();
  CHECK(mean_std(std::vector<double>{0.7}).mean == 0.7);
  CHECK(mean_std(std::vector<double>{0.7}).std == 0.0);
  const auto ms = mean_std(std::vector<double>{0.9, 1.0});
  CHECK(ms.mean == doctest::Approx(0.95));
  CHECK(ms.std == doctest::Approx(0.0707106781).epsilon(1e-8));

  std::vector<MetricRecord> r{
      {"c1", "m", 1, 0.9, 0.8}, {"c1", "m", 2, 0.7, std::nullopt}, {"c1", "m", 3, 0.4, 0.6},
      {"c1", "m", 4, std::nullopt, std::nullopt}, {"c2", "m", 1, 1.0, 1.0}, {"c2", "m", 3, 0.6, 0.2},
  };
  auto btcv = aggregate(r, map, {ScopeKind::btcv, 0});
  REQUIRE(btcv.size() == 2);
  // Per case: c1 (0.9 + 0.7) / 2 = 0.8, c2 1.0; then across cases.
  CHECK(*btcv[0].mean == doctest::Approx(0.9));
  CHECK(btcv[0].count == 2);
  auto pooled = aggregate(r, map, {ScopeKind::btcv, 0}, CaseAggregation::pooled);
  CHECK(*pooled[0].mean == doctest::Approx((0.9 + 0.7 + 1.0) / 3.0));
  CHECK(pooled[0].count == 3);

  auto total = aggregate(r, map, {ScopeKind::total, 0});
  // c1: (0.9 + 0.7 + 0.4) / 3, c2: (1.0 + 0.6) / 2
  CHECK(*total[0].mean == doctest::Approx(((2.0 / 3.0) + 0.8) / 2.0));

  auto label4 = aggregate(r, map, Scope::of_label(4));
  CHECK_FALSE(label4[0].mean);
  CHECK_FALSE(label4[0].std);
  CHECK(label4[0].count == 0);
  CHECK_THROWS_AS(aggregate({}, map, {ScopeKind::total, 0}), ArgumentError);

  // Group labels partition the total scope.
  auto b = scope_labels({ScopeKind::btcv, 0}, map), s = scope_labels({ScopeKind::surgical, 0}, map);
  b.insert(b.end(), s.begin(), s.end());
  std::sort(b.begin(), b.end());
  CHECK(b == scope_labels({ScopeKind::total, 0}, map));

  TempDir dir;
  const auto all = aggregate_all(r, map);
  write_file(dir / "agg.csv", format_aggregates(all));
  const auto back = read_aggregates(dir / "agg.csv");
  REQUIRE(back.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(back[i].scope == all[i].scope);
    CHECK(back[i].mean == all[i].mean);
    CHECK(back[i].std == all[i].std);
  }
}
