#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "published_tables.hpp"
#include "segbench/error.hpp"
#include "segbench/ranking.hpp"
#include "test_support.hpp"

using namespace segbench;
using namespace segbench::testing;

namespace {

std::vector<double> ranks_of(std::vector<double> v, Direction d) { return rank_values(v, d); }
std::vector<int> dense_of(std::vector<double> v) { return dense_rank(v); }

void check_published(const std::string& fixture, const std::vector<PublishedRow>& rows) {
  auto table = MetricTable::read(data_dir() / fixture);
  auto result = rank_models(table, standard_plan());
  REQUIRE(result.models.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    CAPTURE(row.model);
    REQUIRE(result.models[i] == row.model);
    for (std::size_t m = 0; m < kPublishedMetrics.size(); ++m) {
      CAPTURE(kPublishedMetrics[m]);
      CHECK(result.metric_ranks.at(kPublishedMetrics[m])[i] == row.metric_ranks[m]);
    }
    CHECK(result.category("complexity")->ranks[i] == row.complexity);
    for (std::size_t s = 0; s < 3; ++s) {
      const std::string scope = kPublishedScopes[s];
      CAPTURE(scope);
      CHECK(result.category("segmentation:" + scope)->ranks[i] == row.segmentation[s]);
      CHECK(result.final_for("final:" + scope)->ranks[i] == row.final[s]);
    }
  }
}

CategoryRanking make_category(std::vector<std::string> models, std::vector<double> scores) {
  CategoryRanking c;
  c.models = std::move(models);
  c.scores = std::move(scores);
  c.ranks = dense_rank(c.scores);
  return c;
}

}  // namespace

TEST_CASE("rank_values: examples and average ties") {
  CHECK(ranks_of({10, 30, 20}, Direction::lower_better) == std::vector<double>{1, 3, 2});
  CHECK(ranks_of({95.44, 95.18}, Direction::higher_better) == std::vector<double>{1, 2});
  CHECK(ranks_of({5, 5, 7}, Direction::lower_better) == std::vector<double>{1.5, 1.5, 3});
  CHECK(ranks_of({4, 4, 4}, Direction::higher_better) == std::vector<double>{2, 2, 2});
  CHECK(ranks_of({1.0}, Direction::higher_better) == std::vector<double>{1});
  CHECK_THROWS_AS(ranks_of({1.0, NAN}, Direction::higher_better), ArgumentError);
  CHECK_THROWS_AS(ranks_of({}, Direction::higher_better), ArgumentError);
}

TEST_CASE("dense_rank: examples") {
  CHECK(dense_of({2.5, 2.5, 2.5, 5.5, 5.5, 3.5, 6.0}) == std::vector<int>{1, 1, 1, 3, 3, 2, 4});
  CHECK(dense_of({1.0}) == std::vector<int>{1});
  CHECK(dense_of({3, 1, 1}) == std::vector<int>{2, 1, 1});
  // Averages computed in different orders still tie.
  CHECK(dense_of({(0.1 + 0.2) + 0.3, 0.1 + (0.2 + 0.3)}) == std::vector<int>{1, 1});
}

TEST_CASE("category_ranking: complexity and surgical segmentation rows") {
  auto table = MetricTable::read(data_dir() / "table1_metrics.csv");
  auto plan = standard_plan();
  auto comp = category_ranking(table, *plan.complexity, plan.directions);
  CHECK(comp.scores == std::vector<double>{2.5, 2.5, 2.5, 5.5, 5.5, 3.5, 6.0});
  CHECK(comp.ranks == std::vector<int>{1, 1, 1, 3, 3, 2, 4});

  auto surgical = category_ranking(table, {"segmentation:surgical", {"dice_surgical", "nsd_surgical"}},
                                   plan.directions);
  CHECK(surgical.scores == std::vector<double>{1.5, 1.5, 3, 5, 4, 7, 6});
  CHECK(surgical.ranks == std::vector<int>{1, 1, 2, 4, 3, 6, 5});

  auto single = category_ranking(table, {"dice", {"dice_total"}}, plan.directions);
  CHECK(single.ranks == std::vector<int>{2, 1, 3, 5, 4, 7, 6});

  CHECK_THROWS_AS(category_ranking(table, {"empty", {}}, plan.directions), ArgumentError);
  CHECK_THROWS_AS(category_ranking(table, {"x", {"dice_total"}}, {}), ArgumentError);
  CHECK_THROWS_AS(category_ranking(table, {"x", {"hd95"}}, {{"hd95", Direction::lower_better}}), ArgumentError);
}

TEST_CASE("final_ranking: averages raw category scores") {
  std::vector<std::string> models{"a", "b", "c", "d", "e", "f", "g"};
  auto seg = make_category(models, {2, 1, 3, 5, 4, 7, 6});
  auto comp = make_category(models, {2.5, 2.5, 2.5, 5.5, 5.5, 3.5, 6});
  auto fin = final_ranking(seg, comp);
  CHECK(fin.scores == std::vector<double>{2.25, 1.75, 2.75, 5.25, 4.75, 5.25, 6});
  CHECK(fin.ranks == std::vector<int>{2, 1, 3, 5, 4, 5, 6});

  auto same = final_ranking(seg, seg);
  CHECK(same.ranks == seg.ranks);

  // Model order of the complexity input does not matter.
  auto reversed = comp;
  std::reverse(reversed.models.begin(), reversed.models.end());
  std::reverse(reversed.scores.begin(), reversed.scores.end());
  CHECK(final_ranking(seg, reversed).ranks == fin.ranks);

  auto other = make_category({"a", "b", "c", "d", "e", "f", "z"}, comp.scores);
  CHECK_THROWS_AS(final_ranking(seg, other), ArgumentError);
  auto shorter = make_category({"a", "b"}, {1, 2});
  CHECK_THROWS_AS(final_ranking(seg, shorter), ArgumentError);
}

TEST_CASE("published table with the original model set: every ranking column") {
  check_published("table1_metrics.csv", table1_rows());
}

TEST_CASE("published table with four-stage models: every ranking column") {
  check_published("table2_metrics.csv", table2_rows());
}

TEST_CASE("rank_then_aggregate: hand examples") {
  DirectionRegistry dirs{{"dice", Direction::higher_better}};
  SUBCASE("swapped winners tie") {
    std::vector<CaseMetricValue> v{{"c1", "A", "dice", 0.9}, {"c1", "B", "dice", 0.8},
                                   {"c2", "A", "dice", 0.7}, {"c2", "B", "dice", 0.75}};
    auto r = rank_then_aggregate(v, dirs);
    CHECK(r.models == std::vector<std::string>{"A", "B"});
    CHECK(r.scores == std::vector<double>{1.5, 1.5});
    CHECK(r.ranks == std::vector<int>{1, 1});
  }
  SUBCASE("schemes disagree") {
    std::vector<CaseMetricValue> v{{"c1", "A", "dice", 0.9}, {"c1", "B", "dice", 0.8}, {"c1", "C", "dice", 0.7},
                                   {"c2", "A", "dice", 0.1}, {"c2", "B", "dice", 0.85}, {"c2", "C", "dice", 0.8}};
    auto case_based = rank_then_aggregate(v, dirs);
    CHECK(case_based.scores == std::vector<double>{2.0, 1.5, 2.5});
    CHECK(case_based.ranks == std::vector<int>{2, 1, 3});

    MetricTable means;
    means.set("A", "dice", (0.9 + 0.1) / 2);
    means.set("B", "dice", (0.8 + 0.85) / 2);
    means.set("C", "dice", (0.7 + 0.8) / 2);
    auto aggregate_first = category_ranking(means, {"dice", {"dice"}}, dirs);
    CHECK(aggregate_first.ranks == std::vector<int>{3, 1, 2});
  }
  SUBCASE("single case matches metric-based ranking") {
    DirectionRegistry two{{"dice", Direction::higher_better}, {"nsd", Direction::higher_better}};
    std::vector<CaseMetricValue> v;
    MetricTable table;
    const std::vector<std::string> models{"m1", "m2", "m3", "m4"};
    const double dice[] = {0.8, 0.9, 0.7, 0.85};
    const double nsd[] = {0.95, 0.9, 0.6, 0.99};
    for (std::size_t i = 0; i < models.size(); ++i) {
      v.push_back({"only", models[i], "dice", dice[i]});
      v.push_back({"only", models[i], "nsd", nsd[i]});
      table.set(models[i], "dice", dice[i]);
      table.set(models[i], "nsd", nsd[i]);
    }
    auto a = rank_then_aggregate(v, two);
    auto b = category_ranking(table, {"seg", {"dice", "nsd"}}, two);
    CHECK(a.scores == b.scores);
    CHECK(a.ranks == b.ranks);
  }
  SUBCASE("missing cell") {
    std::vector<CaseMetricValue> v{{"c1", "A", "dice", 0.9}, {"c1", "B", "dice", 0.8}, {"c2", "A", "dice", 0.7}};
    CHECK_THROWS_AS(rank_then_aggregate(v, dirs), ArgumentError);
    CHECK_THROWS_AS(rank_then_aggregate({}, dirs), ArgumentError);
  }
}

TEST_CASE("single model ranks first everywhere") {
  MetricTable t;
  for (const char* m : kPublishedMetrics) t.set("solo", m, 1.0);
  auto r = rank_models(t, standard_plan());
  for (const auto& c : r.categories) CHECK(c.ranks == std::vector<int>{1});
  for (const auto& f : r.finals) CHECK(f.ranks == std::vector<int>{1});
}

TEST_CASE("property: rank_values invariant under monotone transforms") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 9);
    for (auto& x : v) x = 0.5 + pick(rng);  // small range forces ties
    for (auto dir : {Direction::higher_better, Direction::lower_better}) {
      const auto base = rank_values(v, dir);
      std::vector<double> t1, t2;
      for (double x : v) {
        t1.push_back(std::log(x) * 3.0 + 7.0);
        t2.push_back(x * x * x);
      }
      CHECK(rank_values(t1, dir) == base);
      CHECK(rank_values(t2, dir) == base);
      std::vector<double> neg;
      for (double x : v) neg.push_back(-x);
      auto flipped = dir == Direction::higher_better ? Direction::lower_better : Direction::higher_better;
      CHECK(rank_values(neg, flipped) == base);
      double sum = 0;
      for (double r : base) sum += r;
      CHECK(sum == doctest::Approx(v.size() * (v.size() + 1) / 2.0));
    }
  }
}

TEST_CASE("property: dense_rank uses 1..K and preserves order") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng() % 12);
    for (auto& x : s) x = 0.5 * static_cast<double>(rng() % 8);
    auto r = dense_rank(s);
    std::set<double> distinct(s.begin(), s.end());
    std::set<int> used(r.begin(), r.end());
    CHECK(used.size() == distinct.size());
    CHECK(*used.begin() == 1);
    CHECK(*used.rbegin() == static_cast<int>(distinct.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[i] < s[j]) CHECK(r[i] < r[j]);
        if (s[i] == s[j]) CHECK(r[i] == r[j]);
      }
    }
  }
}

TEST_CASE("property: final_ranking is symmetric") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<std::string> models;
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      models.push_back("m" + std::to_string(i));
      a.push_back(1.0 + 0.5 * static_cast<double>(rng() % 10));
      b.push_back(1.0 + 0.5 * static_cast<double>(rng() % 10));
    }
    auto ca = make_category(models, a);
    auto cb = make_category(models, b);
    auto ab = final_ranking(ca, cb);
    auto ba = final_ranking(cb, ca);
    CHECK(ab.scores == ba.scores);
    CHECK(ab.ranks == ba.ranks);
  }
}

TEST_CASE("metric table and ranking outputs") {
  TempDir dir;
  write_file(dir / "bad.csv", "model_id,metric_id,value\na,dice_total,1\na,dice_total,2\n");
  CHECK_THROWS_AS(MetricTable::read(dir / "bad.csv"), FormatError);

  MetricTable t;
  t.set("a", "x", 1.0);
  CHECK_THROWS_AS(t.set("a", "y", INFINITY), ArgumentError);
  t.set("b", "x", 2.0);
  write_file(dir / "t.csv", t.format());
  auto back = MetricTable::read(dir / "t.csv");
  CHECK(back.models() == t.models());
  CHECK(back.value("b", "x") == 2.0);
  CHECK_THROWS_AS(back.value("c", "x"), ArgumentError);

  auto table = MetricTable::read(data_dir() / "table1_metrics.csv");
  auto result = rank_models(table, standard_plan());
  auto csv = format_ranking_csv(result, table);
  CHECK(csv.rfind("model_id,kind,key,value,rank\n", 0) == 0);
  CHECK(csv.find("STUNet,final,final:total,1.75,1\n") != std::string::npos);
  CHECK(csv.find("3DSwinUnet,category,complexity,3.5,2\n") != std::string::npos);
  CHECK(csv.find("3DUNet,metric,params_millions,30.6,4\n") != std::string::npos);

  auto text = format_ranking_text(result);
  CHECK(text.find("final:total") != std::string::npos);
  CHECK(text.find(" \n") == std::string::npos);

  auto no_complexity = rank_models(table, standard_plan({"total"}, false));
  CHECK(no_complexity.finals.empty());
  CHECK(no_complexity.categories.size() == 1);
}
