#include "segbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "segbench/csv.hpp"
#include "segbench/error.hpp"
#include "segbench/kv_file.hpp"
#include "segbench/special_functions.hpp"

namespace segbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t level_index(std::vector<std::string>& levels, const std::string& name) {
  auto it = std::find(levels.begin(), levels.end(), name);
  if (it != levels.end()) return static_cast<std::size_t>(it - levels.begin());
  levels.push_back(name);
  return levels.size() - 1;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

void finish_source(AnovaSource& s, const AnovaSource& error, bool zero_error, double zero_ss) {
  s.ms = s.ss / s.df;
  if (zero_error) {
    const bool null_source = s.ss <= zero_ss;
    s.f = null_source ? 0.0 : kInf;
    s.p = null_source ? 1.0 : 0.0;
    return;
  }
  s.f = s.ms / error.ms;
  s.p = f_sf(s.f, s.df, error.df);
}

std::string csv_number(double v) { return std::isnan(v) ? "NA" : format_full(v); }

}  // namespace

AnovaResult two_way_anova(const std::vector<Observation>& observations) {
  if (observations.empty()) throw DataError("ANOVA needs observations");
  AnovaResult r;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
  // Values are shifted by the first observation; this leaves every sum of
  // squares unchanged and makes constant data give exact zeros.
  const double shift = observations.front().value;
  double scale = 0.0;
  for (const auto& o : observations) {
    if (!std::isfinite(o.value)) throw DataError("non-finite observation for " + o.case_id + "/" + o.model_id);
    const auto a = level_index(r.models, o.model_id);
    const auto b = level_index(r.groups, o.group);
    cells[{a, b}].push_back(o.value - shift);
    scale = std::max(scale, std::fabs(o.value - shift));
  }
  const std::size_t na = r.models.size();
  const std::size_t nb = r.groups.size();
  if (na < 2 || nb < 2) throw DataError("ANOVA needs at least two models and two groups");
  const std::size_t n = cells.begin()->second.size();
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      auto it = cells.find({a, b});
      const std::size_t count = it == cells.end() ? 0 : it->second.size();
      if (count != n) {
        throw DataError("unbalanced design: cell (" + r.models[a] + ", " + r.groups[b] + ") has " +
                        std::to_string(count) + " observations, expected " + std::to_string(n));
      }
    }
  }
  if (n < 2) throw DataError("ANOVA needs at least two observations per cell");
  r.replicates = n;

  std::vector<std::vector<double>> cell_mean(na, std::vector<double>(nb));
  std::vector<double> a_mean(na, 0.0), b_mean(nb, 0.0);
  double grand = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double m = mean_of(cells[{a, b}]);
      cell_mean[a][b] = m;
      a_mean[a] += m / nb;
      b_mean[b] += m / na;
      grand += m / (na * nb);
    }
  }
  double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_e = 0.0, ss_t = 0.0;
  for (std::size_t a = 0; a < na; ++a) ss_a += (a_mean[a] - grand) * (a_mean[a] - grand);
  for (std::size_t b = 0; b < nb; ++b) ss_b += (b_mean[b] - grand) * (b_mean[b] - grand);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double inter = cell_mean[a][b] - a_mean[a] - b_mean[b] + grand;
      ss_ab += inter * inter;
      for (double x : cells[{a, b}]) {
        ss_e += (x - cell_mean[a][b]) * (x - cell_mean[a][b]);
        ss_t += (x - grand) * (x - grand);
      }
    }
  }
  ss_a *= static_cast<double>(nb * n);
  ss_b *= static_cast<double>(na * n);
  ss_ab *= static_cast<double>(n);

  const int dfa = static_cast<int>(na) - 1;
  const int dfb = static_cast<int>(nb) - 1;
  r.error = {"error", ss_e, static_cast<int>(na * nb * (n - 1)), 0.0, kNaN, kNaN};
  r.error.ms = r.error.ss / r.error.df;
  r.model = {"model", ss_a, dfa};
  r.group = {"group", ss_b, dfb};
  r.interaction = {"interaction", ss_ab, dfa * dfb};
  r.ss_total = ss_t;
  // Sums of squares below rounding noise of the data count as zero.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  const double zero_ss = static_cast<double>(observations.size()) * noise * noise;
  r.zero_error = ss_e <= zero_ss;
  finish_source(r.model, r.error, r.zero_error, zero_ss);
  finish_source(r.group, r.error, r.zero_error, zero_ss);
  finish_source(r.interaction, r.error, r.zero_error, zero_ss);
  return r;
}

std::vector<TukeyPair> tukey_hsd(const std::vector<TukeyGroup>& groups, double mse, double df_error, double alpha) {
  if (groups.size() < 2) throw DataError("Tukey HSD needs at least two groups");
  if (!(mse > 0.0) || !std::isfinite(mse)) throw ArgumentError("Tukey HSD needs a positive error mean square");
  if (!(df_error > 0.0)) throw ArgumentError("Tukey HSD needs positive error degrees of freedom");
  const std::size_t n = groups.front().values.size();
  for (const auto& g : groups) {
    if (g.values.size() != n) throw DataError("Tukey HSD needs equal group sizes ('" + g.name + "' differs)");
  }
  if (n == 0) throw DataError("Tukey HSD groups are empty");
  const int k = static_cast<int>(groups.size());
  const double se = std::sqrt(mse / static_cast<double>(n));
  std::vector<TukeyPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p{groups[i].name, groups[j].name, mean_of(groups[i].values) - mean_of(groups[j].values), se};
      p.q = std::fabs(p.mean_diff) / se;
      p.p = studentized_range_sf(p.q, k, df_error);
      p.significant = p.p < alpha;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<TukeyPair> tukey_models(const std::vector<Observation>& observations, const AnovaResult& anova,
                                    double alpha) {
  std::vector<TukeyGroup> groups;
  for (const auto& m : anova.models) groups.push_back({m, {}});
  for (const auto& o : observations) {
    auto it = std::find(anova.models.begin(), anova.models.end(), o.model_id);
    if (it == anova.models.end()) throw ArgumentError("observation for model '" + o.model_id + "' not in ANOVA");
    groups[static_cast<std::size_t>(it - anova.models.begin())].values.push_back(o.value);
  }
  if (!anova.zero_error) {
    return tukey_hsd(groups, anova.error.ms, anova.error.df, alpha);
  }
  // Zero error term: only identical means are indistinguishable.
  std::vector<TukeyPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p{groups[i].name, groups[j].name, mean_of(groups[i].values) - mean_of(groups[j].values), 0.0};
      const bool equal = groups[i].values.size() == groups[j].values.size() &&
                         std::fabs(p.mean_diff) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, std::fabs(mean_of(groups[i].values)));
      p.q = equal ? 0.0 : kInf;
      p.p = equal ? 1.0 : 0.0;
      p.significant = p.p < alpha;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Observation> group_observations(const std::vector<MetricRecord>& records, const LabelMap& map,
                                            MetricKind metric) {
  std::vector<std::string> cases, models;
  // (case, model, group) -> sum, count
  std::map<std::tuple<std::string, std::string, LabelGroup>, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    if (!map.is_target(r.label)) continue;
    if (std::find(cases.begin(), cases.end(), r.case_id) == cases.end()) cases.push_back(r.case_id);
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) models.push_back(r.model_id);
    const auto& v = metric == MetricKind::dice ? r.dice : r.nsd;
    if (!v) continue;
    auto& cell = sums[{r.case_id, r.model_id, map.target(r.label).group}];
    cell.first += *v;
    cell.second += 1;
  }
  const LabelGroup order[] = {LabelGroup::surgical, LabelGroup::btcv};
  std::vector<Observation> out;
  for (const auto& c : cases) {
    bool complete = true;
    for (const auto& m : models) {
      for (auto g : order) complete = complete && sums.count({c, m, g}) != 0;
    }
    if (!complete) continue;
    for (const auto& m : models) {
      for (auto g : order) {
        const auto& cell = sums.at({c, m, g});
        out.push_back({c, m, std::string(to_string(g)), cell.first / static_cast<double>(cell.second)});
      }
    }
  }
  return out;
}

std::string format_observations(const std::vector<Observation>& observations) {
  std::ostringstream out;
  out << "case_id,model_id,group,value\n";
  for (const auto& o : observations) {
    out << o.case_id << ',' << o.model_id << ',' << o.group << ',' << format_full(o.value) << '\n';
  }
  return out.str();
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  const auto c_case = csv.column("case_id");
  const auto c_model = csv.column("model_id");
  const auto c_group = csv.column("group");
  const auto c_value = csv.column("value");
  std::vector<Observation> out;
  for (const auto& row : csv.rows) {
    out.push_back({row[c_case], row[c_model], row[c_group], parse_double(row[c_value], csv.source + ": value")});
  }
  return out;
}

std::string format_anova(const AnovaResult& result) {
  std::ostringstream out;
  out << "source,ss,df,ms,f,p\n";
  for (const auto* s : {&result.model, &result.group, &result.interaction, &result.error}) {
    out << s->name << ',' << format_full(s->ss) << ',' << s->df << ',' << format_full(s->ms) << ','
        << csv_number(s->f) << ',' << csv_number(s->p) << '\n';
  }
  return out.str();
}

std::string format_tukey(const std::vector<TukeyPair>& pairs) {
  std::ostringstream out;
  out << "model_a,model_b,mean_diff,std_error,q,p,significant\n";
  for (const auto& p : pairs) {
    out << p.model_a << ',' << p.model_b << ',' << format_full(p.mean_diff) << ',' << format_full(p.std_error) << ','
        << format_full(p.q) << ',' << format_full(p.p) << ',' << (p.significant ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace segbench
