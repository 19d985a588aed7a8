#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "segbench/label_map.hpp"

namespace segbench {

enum class Split { train, val, test };

struct CaseEntry {
  std::string id;
  Split split = Split::train;
  std::set<Label> labels_present;
};

struct CaseInventory {
  std::vector<CaseEntry> cases;

  // CSV `case_id,split,labels_present`; labels are `;`-separated target IDs.
  static CaseInventory load(const std::filesystem::path& path);

  // Throws DataError when a case lists a label the map does not declare.
  void check_labels(const LabelMap& map) const;
  std::size_t count(Split split) const;
};

// Cases holding at least `min_labels` distinct target labels, in input order.
std::vector<std::string> filter_cases(const CaseInventory& inventory, std::size_t min_labels = 23);

std::string_view to_string(Split split);

}  // namespace segbench
