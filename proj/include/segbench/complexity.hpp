#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace segbench {

inline constexpr std::size_t kDefaultWarmup = 10;

struct LatencySeries {
  std::string model_id;
  std::vector<double> samples_ms;
  std::size_t warmup_count = kDefaultWarmup;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double std_ms = 0.0;  // sample standard deviation
  std::size_t count = 0;
};

// Drops the leading warmup samples; needs at least two remaining samples,
// each positive and finite.
LatencyStats latency_stats(const LatencySeries& series);

struct ComplexityRecord {
  std::string model_id;
  double params_millions = 0.0;
  double latency_mean_ms = 0.0;
  double latency_std_ms = 0.0;
};

// Key-value manifest:
//   model_id = ...
//   params_millions = ...
//   latency_series = <path, relative to the manifest>   (optional `warmup`)
// or
//   latency_mean_ms = ... / latency_std_ms = ...
ComplexityRecord ingest_manifest(const std::filesystem::path& path);

// One duration in ms per line; blank lines and `#` comments are skipped.
std::vector<double> read_latency_series(const std::filesystem::path& path);
std::string format_latency_series(const std::vector<double>& samples_ms);
std::string format_manifest(const ComplexityRecord& record, const std::string& series_path = {});

// Runs `command` through /bin/sh `n` times, serially, recording wall-clock
// durations. Throws ExecutionError when an invocation exits non-zero.
LatencySeries time_command(const std::string& command, std::size_t n, std::size_t warmup_count = kDefaultWarmup);

// CSV `model_id,params_millions,latency_mean_ms,latency_std_ms`.
std::string format_complexity(const std::vector<ComplexityRecord>& records);
std::vector<ComplexityRecord> read_complexity(const std::filesystem::path& path);

}  // namespace segbench
