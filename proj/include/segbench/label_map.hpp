#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segbench/volume.hpp"

namespace segbench {

enum class LabelGroup { surgical, btcv };

std::string_view to_string(LabelGroup group);
std::optional<LabelGroup> parse_label_group(std::string_view text);

struct LabelTarget {
  Label id = 0;
  std::string name;
  LabelGroup group = LabelGroup::surgical;
};

// Merge table from source annotation IDs to evaluation targets, plus the
// target list. Target IDs are contiguous from 1; 0 is background.
class LabelMap {
 public:
  LabelMap(std::map<Label, Label> merges, std::vector<LabelTarget> targets);

  // Text key-value file with a [merges] section (`source = target`) and
  // one [targets.<id>] section per target carrying `name` and `group`.
  static LabelMap load(const std::filesystem::path& path);
  static LabelMap parse(const std::string& text, const std::string& source_name = "<string>");

  const std::map<Label, Label>& merges() const noexcept { return merges_; }
  const std::vector<LabelTarget>& targets() const noexcept { return targets_; }
  std::size_t target_count() const noexcept { return targets_.size(); }

  // Target for a source ID; 0 when the source is not merged anywhere.
  Label map(Label source) const noexcept;
  const LabelTarget& target(Label id) const;
  bool is_target(Label id) const noexcept { return id >= 1 && id <= targets_.size(); }
  std::vector<Label> group_labels(LabelGroup group) const;

  // 25 targets split into 13 btcv and 12 surgical labels.
  bool has_standard_grouping() const;

 private:
  std::map<Label, Label> merges_;
  std::vector<LabelTarget> targets_;
  std::vector<Label> lookup_;
};

// Voxel-wise application of the merge table; unmapped IDs become 0.
LabelVolume remap_labels(const LabelVolume& volume, const LabelMap& map);

}  // namespace segbench
