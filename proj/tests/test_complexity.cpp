#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "segbench/complexity.hpp"
#include "segbench/error.hpp"
#include "test_support.hpp"

using namespace segbench;
using namespace segbench::testing;

TEST_CASE("latency stats: hand examples and warmup handling") {
  auto flat = latency_stats({"m", std::vector<double>(20, 5.0), 10});
  CHECK(flat.mean_ms == 5.0);
  CHECK(flat.std_ms == 0.0);
  CHECK(flat.count == 10);

  auto pair = latency_stats({"m", {1.0, 3.0}, 0});
  CHECK(pair.mean_ms == 2.0);
  CHECK(pair.std_ms == doctest::Approx(1.41421356237).epsilon(1e-10));

  std::vector<double> thousand(1000);
  std::iota(thousand.begin(), thousand.end(), 1.0);
  auto protocol = latency_stats({"m", thousand, kDefaultWarmup});
  CHECK(protocol.count == 990);
  CHECK(protocol.mean_ms == doctest::Approx((11.0 + 1000.0) / 2.0));

  // Warmup samples do not influence the result.
  std::vector<double> noisy_warmup{1e6, 1e-3, 7.0, 9.0};
  CHECK(latency_stats({"m", noisy_warmup, 2}).mean_ms == 8.0);

  CHECK_THROWS_AS(latency_stats({"m", {5.0, 5.0}, 1}), ArgumentError);
  CHECK_THROWS_AS(latency_stats({"m", {5.0}, 0}), ArgumentError);
  CHECK_THROWS_AS(latency_stats({"m", {5.0, -1.0}, 0}), ArgumentError);
  CHECK_THROWS_AS(latency_stats({"m", {5.0, std::numeric_limits<double>::infinity()}, 0}), ArgumentError);
}

TEST_CASE("latency stats: permutation and shift properties") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(2 + rng() % 60);
    for (auto& v : s) v = u(rng);
    const auto base = latency_stats({"m", s, 0});

    auto perm = s;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto permuted = latency_stats({"m", perm, 0});
    CHECK(permuted.mean_ms == doctest::Approx(base.mean_ms).epsilon(1e-12));
    CHECK(permuted.std_ms == doctest::Approx(base.std_ms).epsilon(1e-9));

    const double c = u(rng);
    auto shifted = s;
    for (auto& v : shifted) v += c;
    const auto moved = latency_stats({"m", shifted, 0});
    CHECK(moved.mean_ms == doctest::Approx(base.mean_ms + c).epsilon(1e-12));
    CHECK(moved.std_ms == doctest::Approx(base.std_ms).epsilon(1e-8));
  }
}

TEST_CASE("manifests: series reference, inline stats and invalid fields") {
  TempDir dir;
  std::string series = "# warm up\n";
  for (int i = 0; i < 10; ++i) series += "100\n";
  series += "6\n\n6.2\n6.274\n";
  write_file(dir / "series" / "unet.txt", series);
  write_file(dir / "unet.ini", "model_id = 3DUNet\nparams_millions = 30.6\nlatency_series = series/unet.txt\n");
  auto unet = ingest_manifest(dir / "unet.ini");
  CHECK(unet.model_id == "3DUNet");
  CHECK(unet.params_millions == 30.6);
  CHECK(unet.latency_mean_ms == doctest::Approx(6.158));

  write_file(dir / "warm0.ini", "model_id = x\nparams_millions = 1\nlatency_series = series/unet.txt\nwarmup = 0\n");
  CHECK(ingest_manifest(dir / "warm0.ini").latency_mean_ms == doctest::Approx((1000.0 + 18.474) / 13.0));

  write_file(dir / "inline.ini", "model_id = STUNet\nparams_millions = 30.23\nlatency_mean_ms = 7.298\n"
                                 "latency_std_ms = 0.25\n");
  auto inline_rec = ingest_manifest(dir / "inline.ini");
  CHECK(inline_rec.latency_mean_ms == 7.298);
  CHECK(inline_rec.latency_std_ms == 0.25);

  write_file(dir / "zero.ini", "model_id = x\nparams_millions = 0\nlatency_mean_ms = 1\nlatency_std_ms = 0\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "zero.ini"), FormatError);
  write_file(dir / "noparams.ini", "model_id = x\nlatency_mean_ms = 1\nlatency_std_ms = 0\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "noparams.ini"), FormatError);
  write_file(dir / "nolatency.ini", "model_id = x\nparams_millions = 3\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "nolatency.ini"), FormatError);
  write_file(dir / "noid.ini", "params_millions = 3\nlatency_mean_ms = 1\nlatency_std_ms = 0\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "noid.ini"), FormatError);
  write_file(dir / "short.ini", "model_id = x\nparams_millions = 3\nlatency_series = s.txt\n");
  write_file(dir / "s.txt", "1\n2\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "short.ini"), FormatError);
  write_file(dir / "missing.ini", "model_id = x\nparams_millions = 3\nlatency_series = none.txt\n");
  CHECK_THROWS_AS(ingest_manifest(dir / "missing.ini"), IoError);
}

TEST_CASE("manifest and complexity CSV round trips") {
  TempDir dir;
  ComplexityRecord rec{"FocalSegNet", 69.65, 15.412, 0.3};
  write_file(dir / "m.ini", format_manifest(rec));
  auto back = ingest_manifest(dir / "m.ini");
  CHECK(back.model_id == rec.model_id);
  CHECK(back.params_millions == rec.params_millions);
  CHECK(back.latency_mean_ms == rec.latency_mean_ms);
  CHECK(back.latency_std_ms == rec.latency_std_ms);

  std::vector<double> samples{1.5, 2.25, 1.0 / 3.0};
  write_file(dir / "s.txt", format_latency_series(samples));
  CHECK(read_latency_series(dir / "s.txt") == samples);

  std::vector<ComplexityRecord> records{rec, {"a", 1.0, 2.0, 0.0}};
  write_file(dir / "c.csv", format_complexity(records));
  auto read = read_complexity(dir / "c.csv");
  REQUIRE(read.size() == 2);
  CHECK(read[0].latency_mean_ms == 15.412);
  CHECK(read[1].model_id == "a");
}

TEST_CASE("time_command: sleep stub, argument and execution errors") {
  auto series = time_command("sleep 0.01", 25, 5);
  CHECK(series.samples_ms.size() == 25);
  const auto stats = latency_stats(series);
  CHECK(stats.count == 20);
  CHECK(stats.mean_ms >= 10.0);
  CHECK(stats.mean_ms < 60.0);

  CHECK_THROWS_AS(time_command("true", 0), ArgumentError);
  CHECK_THROWS_AS(time_command("exit 3", 2), ExecutionError);
}
