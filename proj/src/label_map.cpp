#include "segbench/label_map.hpp"

#include <algorithm>
#include <limits>

#include "segbench/kv_file.hpp"

namespace segbench {

namespace {

Label parse_label_id(std::string_view text, const std::string& what) {
  long long v = parse_int(text, what);
  if (v < 0 || v > std::numeric_limits<Label>::max()) throw FormatError(what + ": label ID out of range");
  return static_cast<Label>(v);
}

LabelMap parse_tree(const KvTree& kv) {
  const std::string& src = kv.source();
  std::map<Label, Label> merges;
  for (const auto& [key, value] : kv.entries("merges")) {
    Label source = parse_label_id(key, src + ": [merges] key");
    if (!merges.emplace(source, parse_label_id(value, src + ": [merges] " + key)).second) {
      throw FormatError(src + ": duplicate merge for source " + key);
    }
  }
  std::vector<LabelTarget> targets;
  constexpr std::string_view prefix = "targets.";
  for (const auto& section : kv.sections()) {
    if (section.rfind(prefix, 0) != 0) continue;
    LabelTarget t;
    t.id = parse_label_id(section.substr(prefix.size()), src + ": [" + section + "]");
    t.name = kv.require(section + "/name");
    auto group = parse_label_group(kv.require(section + "/group"));
    if (!group) throw FormatError(src + ": [" + section + "] group must be \"surgical\" or \"btcv\"");
    t.group = *group;
    targets.push_back(std::move(t));
  }
  try {
    return LabelMap(std::move(merges), std::move(targets));
  } catch (const ArgumentError& e) {
    throw FormatError(src + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(LabelGroup group) {
  return group == LabelGroup::surgical ? "surgical" : "btcv";
}

std::optional<LabelGroup> parse_label_group(std::string_view text) {
  if (text == "surgical") return LabelGroup::surgical;
  if (text == "btcv") return LabelGroup::btcv;
  return std::nullopt;
}

LabelMap::LabelMap(std::map<Label, Label> merges, std::vector<LabelTarget> targets)
    : merges_(std::move(merges)), targets_(std::move(targets)) {
  if (targets_.empty()) throw ArgumentError("label map has no targets");
  std::sort(targets_.begin(), targets_.end(),
            [](const LabelTarget& a, const LabelTarget& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (targets_[i].id != i + 1) {
      throw ArgumentError("label map target IDs must be contiguous from 1 (gap or duplicate at " +
                          std::to_string(targets_[i].id) + ")");
    }
  }
  Label max_source = 0;
  for (const auto& [source, target] : merges_) {
    if (source == 0) throw ArgumentError("source label 0 is background and cannot be merged");
    if (!is_target(target)) {
      throw ArgumentError("merge " + std::to_string(source) + " -> " + std::to_string(target) +
                          " names an undeclared target");
    }
    max_source = std::max(max_source, source);
  }
  lookup_.assign(static_cast<std::size_t>(max_source) + 1, 0);
  for (const auto& [source, target] : merges_) lookup_[source] = target;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  return parse_tree(KvTree::load(path));
}

LabelMap LabelMap::parse(const std::string& text, const std::string& source_name) {
  return parse_tree(KvTree::parse(text, source_name));
}

Label LabelMap::map(Label source) const noexcept {
  return source < lookup_.size() ? lookup_[source] : Label{0};
}

const LabelTarget& LabelMap::target(Label id) const {
  if (!is_target(id)) throw ArgumentError("unknown target label " + std::to_string(id));
  return targets_[id - 1];
}

std::vector<Label> LabelMap::group_labels(LabelGroup group) const {
  std::vector<Label> ids;
  for (const auto& t : targets_) {
    if (t.group == group) ids.push_back(t.id);
  }
  return ids;
}

bool LabelMap::has_standard_grouping() const {
  return targets_.size() == 25 && group_labels(LabelGroup::btcv).size() == 13 &&
         group_labels(LabelGroup::surgical).size() == 12;
}

LabelVolume remap_labels(const LabelVolume& volume, const LabelMap& map) {
  LabelVolume out = volume;
  for (auto& v : out.voxels.values()) v = map.map(v);
  return out;
}

}  // namespace segbench
