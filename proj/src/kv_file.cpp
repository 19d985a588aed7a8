#include "segbench/kv_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "segbench/error.hpp"

namespace segbench {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string value) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    return value.substr(1, value.size() - 2);
  }
  return value;
}

pt::ptree::path_type slash_path(std::string_view path) {
  return pt::ptree::path_type(std::string(path), '/');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

KvTree KvTree::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

KvTree KvTree::parse(const std::string& text, const std::string& source_name) {
  KvTree kv;
  kv.source_ = source_name;
  std::istringstream in(text);
  try {
    pt::read_ini(in, kv.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(source_name + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return kv;
}

std::optional<std::string> KvTree::get(std::string_view path) const {
  auto node = tree_.get_child_optional(slash_path(path));
  if (!node || !node->empty()) return std::nullopt;
  return unquote(node->data());
}

std::string KvTree::require(std::string_view path) const {
  auto value = get(path);
  if (!value) throw FormatError(source_ + ": missing key '" + std::string(path) + "'");
  return *value;
}

std::optional<double> KvTree::get_double(std::string_view path) const {
  auto value = get(path);
  if (!value) return std::nullopt;
  return parse_double(*value, source_ + ": " + std::string(path));
}

std::optional<long long> KvTree::get_int(std::string_view path) const {
  auto value = get(path);
  if (!value) return std::nullopt;
  return parse_int(*value, source_ + ": " + std::string(path));
}

bool KvTree::has_section(std::string_view name) const {
  for (const auto& [key, child] : tree_) {
    if (key == name && !child.empty()) return true;
  }
  return false;
}

std::vector<std::string> KvTree::sections() const {
  std::vector<std::string> names;
  for (const auto& [key, child] : tree_) {
    if (!child.empty()) names.push_back(key);
  }
  return names;
}

std::vector<std::pair<std::string, std::string>> KvTree::entries(std::string_view section) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, child] : tree_) {
    if (key != section) continue;
    for (const auto& [k, v] : child) out.emplace_back(k, unquote(v.data()));
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  auto t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw FormatError(std::string(what) + ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text, std::string_view what) {
  auto t = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw FormatError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace segbench
