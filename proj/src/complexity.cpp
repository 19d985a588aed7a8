#include "segbench/complexity.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "segbench/csv.hpp"
#include "segbench/error.hpp"
#include "segbench/kv_file.hpp"

extern char** environ;

namespace segbench {

LatencyStats latency_stats(const LatencySeries& series) {
  const auto& s = series.samples_ms;
  if (s.size() < series.warmup_count + 2) {
    throw ArgumentError("latency series for '" + series.model_id + "' needs at least 2 samples after " +
                        std::to_string(series.warmup_count) + " warmup iterations (has " +
                        std::to_string(s.size()) + ")");
  }
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("latency samples must be positive and finite");
  }
  const std::size_t n = s.size() - series.warmup_count;
  double sum = 0.0;
  for (std::size_t i = series.warmup_count; i < s.size(); ++i) sum += s[i];
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = series.warmup_count; i < s.size(); ++i) ss += (s[i] - mean) * (s[i] - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1)), n};
}

std::vector<double> read_latency_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open latency series " + path.string());
  std::vector<double> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    samples.push_back(parse_double(line, path.string() + ":" + std::to_string(line_no)));
  }
  return samples;
}

std::string format_latency_series(const std::vector<double>& samples_ms) {
  std::string out;
  for (double v : samples_ms) {
    out += format_full(v);
    out += '\n';
  }
  return out;
}

std::string format_manifest(const ComplexityRecord& record, const std::string& series_path) {
  std::ostringstream out;
  out << "model_id = " << record.model_id << '\n';
  out << "params_millions = " << format_full(record.params_millions) << '\n';
  if (!series_path.empty()) {
    out << "latency_series = " << series_path << '\n';
  } else {
    out << "latency_mean_ms = " << format_full(record.latency_mean_ms) << '\n';
    out << "latency_std_ms = " << format_full(record.latency_std_ms) << '\n';
  }
  return out.str();
}

ComplexityRecord ingest_manifest(const std::filesystem::path& path) {
  const auto kv = KvTree::load(path);
  const std::string src = path.string();
  ComplexityRecord rec;
  rec.model_id = kv.require("model_id");
  if (rec.model_id.empty()) throw FormatError(src + ": empty model_id");
  auto params = kv.get_double("params_millions");
  if (!params) throw FormatError(src + ": missing key 'params_millions'");
  if (!(*params > 0.0)) throw FormatError(src + ": params_millions must be positive");
  rec.params_millions = *params;

  if (auto series_ref = kv.get("latency_series")) {
    std::filesystem::path series_path = *series_ref;
    if (series_path.is_relative()) series_path = path.parent_path() / series_path;
    LatencySeries series{rec.model_id, read_latency_series(series_path), kDefaultWarmup};
    if (auto warmup = kv.get_int("warmup")) {
      if (*warmup < 0) throw FormatError(src + ": warmup must be non-negative");
      series.warmup_count = static_cast<std::size_t>(*warmup);
    }
    try {
      auto stats = latency_stats(series);
      rec.latency_mean_ms = stats.mean_ms;
      rec.latency_std_ms = stats.std_ms;
    } catch (const ArgumentError& e) {
      throw FormatError(src + ": " + e.what());
    }
    return rec;
  }
  auto mean = kv.get_double("latency_mean_ms");
  auto std = kv.get_double("latency_std_ms");
  if (!mean || !std) {
    throw FormatError(src + ": needs latency_series or both latency_mean_ms and latency_std_ms");
  }
  if (!(*mean > 0.0) || *std < 0.0) throw FormatError(src + ": latency mean must be positive, std non-negative");
  rec.latency_mean_ms = *mean;
  rec.latency_std_ms = *std;
  return rec;
}

LatencySeries time_command(const std::string& command, std::size_t n, std::size_t warmup_count) {
  if (n == 0) throw ArgumentError("time_command needs at least one run");
  if (command.empty()) throw ArgumentError("empty command");
  LatencySeries series;
  series.model_id = command;
  series.warmup_count = warmup_count;
  series.samples_ms.reserve(n);
  std::string shell = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
  for (std::size_t i = 0; i < n; ++i) {
    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    if (int rc = posix_spawn(&pid, "/bin/sh", nullptr, nullptr, argv, environ); rc != 0) {
      throw ExecutionError("failed to spawn '" + command + "': error " + std::to_string(rc));
    }
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw ExecutionError("waitpid failed for '" + command + "'");
    const auto stop = std::chrono::steady_clock::now();
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      throw ExecutionError("'" + command + "' failed on run " + std::to_string(i + 1) + " (status " +
                           std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + ")");
    }
    series.samples_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return series;
}

std::string format_complexity(const std::vector<ComplexityRecord>& records) {
  std::ostringstream out;
  out << "model_id,params_millions,latency_mean_ms,latency_std_ms\n";
  for (const auto& r : records) {
    out << r.model_id << ',' << format_full(r.params_millions) << ',' << format_full(r.latency_mean_ms) << ','
        << format_full(r.latency_std_ms) << '\n';
  }
  return out.str();
}

std::vector<ComplexityRecord> read_complexity(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_model = table.column("model_id");
  const auto c_params = table.column("params_millions");
  const auto c_mean = table.column("latency_mean_ms");
  const auto c_std = table.column("latency_std_ms");
  std::vector<ComplexityRecord> out;
  for (const auto& row : table.rows) {
    out.push_back({row[c_model], parse_double(row[c_params], table.source + ": params_millions"),
                   parse_double(row[c_mean], table.source + ": latency_mean_ms"),
                   parse_double(row[c_std], table.source + ": latency_std_ms")});
  }
  return out;
}

}  // namespace segbench
