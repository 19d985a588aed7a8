#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace segbench {

// Text key-value tree: `key = value` lines, optionally grouped under
// `[section]` headers; `;` and `#` start comment lines. Values may be
// wrapped in double quotes. Section names may contain dots
// (e.g. `[targets.3]`); lookups use "section/key" paths.
class KvTree {
 public:
  static KvTree load(const std::filesystem::path& path);
  static KvTree parse(const std::string& text, const std::string& source_name = "<string>");

  // "key" for a top-level key, "section/key" for a sectioned one.
  std::optional<std::string> get(std::string_view path) const;
  std::string require(std::string_view path) const;
  std::optional<double> get_double(std::string_view path) const;
  std::optional<long long> get_int(std::string_view path) const;

  bool has_section(std::string_view name) const;
  // Names of every [section], in file order.
  std::vector<std::string> sections() const;
  // key/value pairs of one section, in file order (empty if absent).
  std::vector<std::pair<std::string, std::string>> entries(std::string_view section) const;

  const std::string& source() const noexcept { return source_; }

 private:
  boost::property_tree::ptree tree_;
  std::string source_;
};

// Parses a whole string as a finite double; throws FormatError naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace segbench
