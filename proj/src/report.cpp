#include "segbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "segbench/csv.hpp"
#include "segbench/error.hpp"
#include "segbench/kv_file.hpp"

namespace segbench {

namespace {

std::string scope_title(const std::string& scope) {
  if (scope == "btcv") return "BTCV";
  if (scope == "surgical") return "Surgery";
  if (scope == "total") return "Total";
  if (scope.rfind("label:", 0) == 0) return "Label " + scope.substr(6);
  return scope;
}

std::string pad(const std::string& text, std::size_t width) {
  const std::size_t w = display_width(text);
  return text + std::string(width > w ? width - w : 0, ' ');
}

std::string na_or(const std::optional<double>& v) { return v ? format_full(*v) : "NA"; }

}  // namespace

std::vector<RankingRow> read_ranking_rows(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  const auto c_model = csv.column("model_id");
  const auto c_kind = csv.column("kind");
  const auto c_key = csv.column("key");
  const auto c_value = csv.column("value");
  const auto c_rank = csv.column("rank");
  std::vector<RankingRow> rows;
  for (const auto& row : csv.rows) {
    rows.push_back({row[c_model], row[c_kind], row[c_key], parse_double(row[c_value], csv.source + ": value"),
                    parse_double(row[c_rank], csv.source + ": rank")});
  }
  return rows;
}

std::string superscript_rank(double rank) {
  static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  const std::string text = rank == std::floor(rank) ? fmt::format("{}", static_cast<long long>(rank))
                                                    : fmt::format("{:.1f}", rank);
  std::string out;
  for (char c : text) {
    if (c >= '0' && c <= '9') out += digits[c - '0'];
    else if (c == '.') out += "·";
    else out += c;
  }
  return out;
}

std::size_t display_width(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string render_report(const ReportInputs& in) {
  if (in.ranking.empty()) throw DataError("nothing to report: ranking table is empty");
  std::vector<std::string> models;
  std::map<std::tuple<std::string, std::string, std::string>, const RankingRow*> lookup;
  for (const auto& r : in.ranking) {
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
    lookup[{r.model_id, r.kind, r.key}] = &r;
  }
  auto find = [&](const std::string& model, const std::string& kind, const std::string& key) -> const RankingRow* {
    auto it = lookup.find({model, kind, key});
    return it == lookup.end() ? nullptr : it->second;
  };
  auto present = [&](const std::string& kind, const std::string& key) {
    return std::all_of(models.begin(), models.end(), [&](const auto& m) { return find(m, kind, key) != nullptr; });
  };
  auto metric_std = [&](const std::string& model, const std::string& key) -> std::optional<double> {
    if (key == "latency_mean_ms") {
      for (const auto& c : in.complexity) {
        if (c.model_id == model) return c.latency_std_ms;
      }
      return std::nullopt;
    }
    const auto underscore = key.find('_');
    if (underscore == std::string::npos) return std::nullopt;
    const std::string metric = key.substr(0, underscore);
    const std::string scope = key.substr(underscore + 1);
    for (const auto& a : in.aggregates) {
      if (a.model_id == model && to_string(a.scope) == scope && to_string(a.metric) == metric) return a.std;
    }
    return std::nullopt;
  };

  struct Column {
    std::string title;
    std::vector<std::string> cells;
  };
  std::vector<Column> columns{{"Model", models}};
  auto add_metric = [&](const std::string& title, const std::string& key) {
    if (!present("metric", key)) return;
    Column col{title, {}};
    for (const auto& m : models) {
      const auto* row = find(m, "metric", key);
      std::string cell = fmt::format("{:.4f}", row->value);
      if (auto sd = metric_std(m, key)) cell += fmt::format(" ± {:.4f}", *sd);
      col.cells.push_back(cell + " " + superscript_rank(row->rank));
    }
    columns.push_back(std::move(col));
  };
  auto add_rank = [&](const std::string& title, const std::string& kind, const std::string& key) {
    if (!present(kind, key)) return;
    Column col{title, {}};
    for (const auto& m : models) col.cells.push_back(fmt::format("{}", find(m, kind, key)->rank));
    columns.push_back(std::move(col));
  };

  add_metric("Params (M)", "params_millions");
  add_metric("Latency (ms)", "latency_mean_ms");
  add_rank("Complexity", "category", "complexity");
  for (const auto& s : in.scopes) add_metric("Dice " + scope_title(s), "dice_" + s);
  for (const auto& s : in.scopes) add_metric("NSD " + scope_title(s), "nsd_" + s);
  for (const auto& s : in.scopes) add_rank("Seg. " + scope_title(s), "category", "segmentation:" + s);
  for (const auto& s : in.scopes) add_rank("Final " + scope_title(s), "final", "final:" + s);
  if (columns.size() == 1) throw DataError("nothing to report: ranking table has no recognised columns");

  std::vector<std::size_t> widths;
  for (const auto& c : columns) {
    std::size_t w = display_width(c.title);
    for (const auto& cell : c.cells) w = std::max(w, display_width(cell));
    widths.push_back(w);
  }
  std::ostringstream out;
  auto emit = [&](auto cell_of) {
    std::string line;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) line += " | ";
      line += pad(cell_of(c), widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit([&](std::size_t c) { return columns[c].title; });
  {
    std::string rule;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) rule += "-+-";
      rule += std::string(widths[c], '-');
    }
    out << rule << '\n';
  }
  for (std::size_t r = 0; r < models.size(); ++r) emit([&](std::size_t c) { return columns[c].cells[r]; });
  return out.str();
}

std::string format_boxplot(const std::vector<MetricRecord>& records, const LabelMap* map) {
  std::vector<std::string> models, cases;
  std::vector<Label> labels;
  std::map<std::tuple<std::string, Label, std::string>, const MetricRecord*> lookup;
  for (const auto& r : records) {
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
    if (std::find(cases.begin(), cases.end(), r.case_id) == cases.end()) cases.push_back(r.case_id);
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
    lookup[{r.model_id, r.label, r.case_id}] = &r;
  }
  std::sort(labels.begin(), labels.end());
  std::ostringstream out;
  out << "model_id,label_id,label_name,case_id,dice,nsd\n";
  for (const auto& m : models) {
    for (Label l : labels) {
      const std::string name = map && map->is_target(l) ? map->target(l).name : std::string();
      for (const auto& c : cases) {
        auto it = lookup.find({m, l, c});
        if (it == lookup.end()) continue;
        out << m << ',' << l << ',' << name << ',' << c << ',' << na_or(it->second->dice) << ','
            << na_or(it->second->nsd) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace segbench
