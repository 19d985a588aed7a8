#include "segbench/config.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "segbench/error.hpp"

namespace segbench {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"out_dir", "jobs"}},
      {"paths", {"ground_truth", "label_map", "inventory", "scores", "reference"}},
      {"fusion", {"patch_size", "overlap", "sigma_coeff"}},
      {"evaluate", {"tau_mm", "case_aggregation", "min_labels", "split", "remap_truth", "remap_predictions"}},
      {"ranking", {"scopes"}},
      {"stats", {"enabled", "alpha"}},
  };
  return keys;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ArgumentError(what + ": expected true or false, got '" + text + "'");
}

std::size_t parse_count(const KvTree& tree, const std::string& key, std::size_t fallback) {
  auto v = tree.get(key);
  if (!v) return fallback;
  long long n = 0;
  try {
    n = parse_int(*v, key);
  } catch (const FormatError& e) {
    throw ArgumentError(e.what());
  }
  if (n < 0) throw ArgumentError(key + " must be non-negative");
  return static_cast<std::size_t>(n);
}

double parse_real(const KvTree& tree, const std::string& key, double fallback) {
  auto v = tree.get(key);
  if (!v) return fallback;
  try {
    return parse_double(*v, key);
  } catch (const FormatError& e) {
    throw ArgumentError(e.what());
  }
}

}  // namespace

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

RunConfig RunConfig::from_tree(const KvTree& tree, const std::filesystem::path& base_dir) {
  for (const auto& section : tree.sections()) {
    if (section == "models" || section == "directions") continue;
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ArgumentError(tree.source() + ": unknown section [" + section + "]");
    for (const auto& [key, value] : tree.entries(section)) {
      if (!it->second.count(key)) throw ArgumentError(tree.source() + ": unknown key '" + key + "' in [" + section + "]");
    }
  }
  auto resolve = [&](const std::string& key) -> std::optional<std::filesystem::path> {
    auto v = tree.get(key);
    if (!v) return std::nullopt;
    std::filesystem::path p(*v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  RunConfig c;
  if (auto p = resolve("run/out_dir")) c.out_dir = *p;
  c.jobs = parse_count(tree, "run/jobs", c.jobs);
  c.ground_truth_dir = resolve("paths/ground_truth");
  c.label_map = resolve("paths/label_map");
  c.inventory = resolve("paths/inventory");
  c.scores_dir = resolve("paths/scores");
  c.reference_dir = resolve("paths/reference");
  for (const auto& [model, dir] : tree.entries("models")) {
    std::filesystem::path p(dir);
    c.models.emplace_back(model, p.is_relative() && !base_dir.empty() ? base_dir / p : p);
  }
  for (const auto& [metric, text] : tree.entries("directions")) {
    if (text == "higher") c.directions[metric] = Direction::higher_better;
    else if (text == "lower") c.directions[metric] = Direction::lower_better;
    else throw ArgumentError("directions/" + metric + ": expected higher or lower, got '" + text + "'");
  }
  c.patch_size = parse_count(tree, "fusion/patch_size", c.patch_size);
  c.overlap = parse_real(tree, "fusion/overlap", c.overlap);
  c.sigma_coeff = parse_real(tree, "fusion/sigma_coeff", c.sigma_coeff);
  c.tau_mm = parse_real(tree, "evaluate/tau_mm", c.tau_mm);
  if (auto v = tree.get("evaluate/case_aggregation")) {
    if (*v == "case_mean") c.case_aggregation = CaseAggregation::case_mean;
    else if (*v == "pooled") c.case_aggregation = CaseAggregation::pooled;
    else throw ArgumentError("evaluate/case_aggregation: expected case_mean or pooled, got '" + *v + "'");
  }
  c.min_labels = parse_count(tree, "evaluate/min_labels", c.min_labels);
  if (auto v = tree.get("evaluate/split")) c.split = *v;
  if (auto v = tree.get("evaluate/remap_truth")) c.remap_truth = parse_bool(*v, "evaluate/remap_truth");
  if (auto v = tree.get("evaluate/remap_predictions")) {
    c.remap_predictions = parse_bool(*v, "evaluate/remap_predictions");
  }
  if (auto v = tree.get("ranking/scopes")) c.scopes = split_list(*v);
  if (auto v = tree.get("stats/enabled")) c.stats_enabled = parse_bool(*v, "stats/enabled");
  c.alpha = parse_real(tree, "stats/alpha", c.alpha);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  KvTree tree = [&] {
    try {
      return KvTree::load(path);
    } catch (const IoError& e) {
      throw ArgumentError(std::string("cannot read config: ") + e.what());
    } catch (const FormatError& e) {
      throw ArgumentError(std::string("invalid config: ") + e.what());
    }
  }();
  return from_tree(tree, path.parent_path());
}

void RunConfig::validate() const {
  if (jobs < 1) throw ArgumentError("jobs must be >= 1");
  if (patch_size < 1) throw ArgumentError("patch_size must be >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ArgumentError("overlap must be in [0, 1)");
  if (!(sigma_coeff > 0.0)) throw ArgumentError("sigma_coeff must be positive");
  if (!(tau_mm > 0.0)) throw ArgumentError("tau_mm must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must be in (0, 1)");
  static const std::set<std::string> splits{"train", "val", "test", "all"};
  if (!splits.count(split)) throw ArgumentError("split must be one of train, val, test, all");
  if (scopes.empty()) throw ArgumentError("at least one ranking scope is required");
  for (const auto& s : scopes) {
    try {
      (void)parse_scope(s);
    } catch (const Error&) {
      throw ArgumentError("unknown ranking scope '" + s + "'");
    }
  }
  std::set<std::string> seen;
  for (const auto& [model, dir] : models) {
    if (!seen.insert(model).second) throw ArgumentError("model '" + model + "' listed twice");
  }
}

}  // namespace segbench
