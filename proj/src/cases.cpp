#include "segbench/cases.hpp"

#include <algorithm>

#include "segbench/csv.hpp"
#include "segbench/kv_file.hpp"

namespace segbench {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

CaseInventory CaseInventory::load(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_id = table.column("case_id");
  const auto c_split = table.column("split");
  const auto c_labels = table.column("labels_present");
  CaseInventory inventory;
  for (const auto& row : table.rows) {
    CaseEntry entry;
    entry.id = row[c_id];
    if (entry.id.empty()) throw FormatError(table.source + ": empty case_id");
    const auto& split = row[c_split];
    if (split == "train") entry.split = Split::train;
    else if (split == "val") entry.split = Split::val;
    else if (split == "test") entry.split = Split::test;
    else throw FormatError(table.source + ": case " + entry.id + ": unknown split '" + split + "'");

    std::string_view labels = row[c_labels];
    while (!labels.empty()) {
      auto semi = labels.find(';');
      auto item = labels.substr(0, semi);
      if (!item.empty()) {
        long long id = parse_int(item, table.source + ": case " + entry.id);
        if (id <= 0 || id > 65535) throw FormatError(table.source + ": case " + entry.id + ": bad label ID");
        entry.labels_present.insert(static_cast<Label>(id));
      }
      if (semi == std::string_view::npos) break;
      labels.remove_prefix(semi + 1);
    }
    inventory.cases.push_back(std::move(entry));
  }
  return inventory;
}

void CaseInventory::check_labels(const LabelMap& map) const {
  for (const auto& c : cases) {
    for (Label l : c.labels_present) {
      if (!map.is_target(l)) {
        throw DataError("case " + c.id + " lists label " + std::to_string(l) + " absent from the label map");
      }
    }
  }
}

std::size_t CaseInventory::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [&](const CaseEntry& c) { return c.split == split; }));
}

std::vector<std::string> filter_cases(const CaseInventory& inventory, std::size_t min_labels) {
  std::vector<std::string> ids;
  for (const auto& c : inventory.cases) {
    if (c.labels_present.size() >= min_labels) ids.push_back(c.id);
  }
  return ids;
}

}  // namespace segbench
