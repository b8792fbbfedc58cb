#include "topiceval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "topiceval/text.hpp"

namespace topiceval {

namespace {

std::string config_label(const std::string& model, const std::string& dataset, int k) {
  return model + "/" + dataset + "/K" + std::to_string(k);
}

Aggregation primary_aggregation(MetricId m) {
  switch (metric_kind(m)) {
    case MetricKind::kRating: return Aggregation::kMean;
    case MetricKind::kThemeCount: return Aggregation::kMeanCount;
    default: return Aggregation::kMajorityCount;
  }
}

bool is_primary_model_level(const ScoreRow& row) {
  if (row.scope != "model-level" || !row.value) return false;
  const auto m = parse_metric_id(row.metric);
  if (!m || std::find(kJudgeMetrics.begin(), kJudgeMetrics.end(), *m) == kJudgeMetrics.end()) return false;
  return row.aggregation == to_string(primary_aggregation(*m));
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

nlohmann::json cell_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

std::optional<Orientation> orientation_of(std::string_view column) {
  const auto base = column.substr(0, column.find('@'));
  if (const auto m = parse_metric_id(base)) {
    return is_lower_better(*m) ? Orientation::kLowerBetter : Orientation::kHigherBetter;
  }
  if (const auto b = parse_baseline_metric(base)) {
    return is_lower_better(*b) ? Orientation::kLowerBetter : Orientation::kHigherBetter;
  }
  return std::nullopt;
}

std::string_view arrow(Orientation o) { return o == Orientation::kHigherBetter ? "↑" : "↓"; }

std::size_t MetricMatrix::add_row(const std::string& label) {
  auto it = std::find(rows.begin(), rows.end(), label);
  if (it != rows.end()) return static_cast<std::size_t>(it - rows.begin());
  rows.push_back(label);
  cells.emplace_back(columns.size());
  return rows.size() - 1;
}

std::size_t MetricMatrix::add_column(const std::string& name, std::optional<Orientation> o) {
  if (!o) o = orientation_of(name);
  if (o && !orientation.contains(name)) orientation[name] = *o;
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it != columns.end()) return static_cast<std::size_t>(it - columns.begin());
  columns.push_back(name);
  for (auto& r : cells) r.emplace_back();
  return columns.size() - 1;
}

void MetricMatrix::set(const std::string& row, const std::string& column, double value) {
  const auto j = add_column(column, orientation_of(column));
  const auto i = add_row(row);
  cells[i][j] = value;
}

std::vector<std::optional<double>> MetricMatrix::column(std::size_t j) const {
  std::vector<std::optional<double>> out;
  for (const auto& r : cells) out.push_back(r[j]);
  return out;
}

MetricMatrix align_directions(const MetricMatrix& m) {
  MetricMatrix out = m;
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    const auto it = m.orientation.find(m.columns[j]);
    if (it == m.orientation.end()) throw AnalysisError("no orientation for column '" + m.columns[j] + "'");
    if (it->second == Orientation::kHigherBetter) continue;
    std::optional<double> hi;
    for (const auto& r : m.cells) {
      if (r[j]) hi = hi ? std::max(*hi, *r[j]) : *r[j];
    }
    for (auto& r : out.cells) {
      if (r[j]) r[j] = *hi - *r[j];
    }
    out.orientation[m.columns[j]] = Orientation::kHigherBetter;
  }
  return out;
}

std::string_view to_string(CorrMethod m) { return m == CorrMethod::kPearson ? "pearson" : "spearman"; }

CorrMethod parse_corr_method(std::string_view name) {
  if (name == "pearson") return CorrMethod::kPearson;
  if (name == "spearman") return CorrMethod::kSpearman;
  throw AnalysisError("unknown correlation method '" + std::string(name) + "'");
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw AnalysisError("pearson: length mismatch");
  const auto n = x.size();
  if (n < 3) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

PairedCorrelation correlate(const std::vector<std::optional<double>>& x, const std::vector<std::optional<double>>& y,
                            CorrMethod method) {
  if (x.size() != y.size()) throw AnalysisError("correlate: length mismatch");
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      a.push_back(*x[i]);
      b.push_back(*y[i]);
    }
  }
  PairedCorrelation out;
  out.n_used = a.size();
  out.r = method == CorrMethod::kPearson ? pearson(a, b) : spearman(a, b);
  return out;
}

CorrelationMatrix correlation_matrix(const MetricMatrix& m, CorrMethod method) {
  CorrelationMatrix out;
  out.method = method;
  out.labels = m.columns;
  const auto n = m.columns.size();
  out.r.assign(n, std::vector<std::optional<double>>(n));
  out.n_used.assign(n, std::vector<std::size_t>(n, 0));
  std::vector<std::vector<std::optional<double>>> cols;
  for (std::size_t j = 0; j < n; ++j) cols.push_back(m.column(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      auto c = correlate(cols[i], cols[j], method);
      if (i == j && c.r) c.r = 1.0;
      out.r[i][j] = out.r[j][i] = c.r;
      out.n_used[i][j] = out.n_used[j][i] = c.n_used;
    }
  }
  return out;
}

ObservationUnit parse_observation_unit(std::string_view name) {
  if (name == "config") return ObservationUnit::kConfig;
  if (name == "topic") return ObservationUnit::kTopic;
  throw AnalysisError("unknown observation unit '" + std::string(name) + "'");
}

MetricMatrix build_metric_matrix(const std::vector<ScoreRow>& scores, const std::vector<BaselineReport>& baselines,
                                 ObservationUnit unit) {
  std::set<std::string> llms;
  for (const auto& s : scores) llms.insert(s.llm);

  // Fixed column order: judge metrics by judge, then baselines.
  MetricMatrix m;
  for (auto metric : kJudgeMetrics) {
    if (unit == ObservationUnit::kTopic && metric == MetricId::kDRate) continue;
    for (const auto& llm : llms) {
      const bool present = std::any_of(scores.begin(), scores.end(), [&](const ScoreRow& s) {
        return s.llm == llm && s.metric == to_string(metric);
      });
      if (present) {
        const auto name = std::string(to_string(metric)) + "@" + llm;
        m.add_column(name, orientation_of(name));
      }
    }
  }
  for (auto b : kAllBaselineMetrics) {
    if (unit == ObservationUnit::kTopic && !is_coherence(b)) continue;
    const bool present = std::any_of(baselines.begin(), baselines.end(), [&](const BaselineReport& r) {
      return std::any_of(r.scores.begin(), r.scores.end(), [&](const BaselineScore& s) { return s.metric == b; });
    });
    if (present) m.add_column(std::string(to_string(b)), orientation_of(to_string(b)));
  }

  std::map<std::string, std::map<std::string, double>> values;  // row -> column -> value
  if (unit == ObservationUnit::kConfig) {
    for (const auto& s : scores) {
      if (is_primary_model_level(s)) values[config_label(s.model, s.dataset, s.k)][s.metric + "@" + s.llm] = *s.value;
    }
    for (const auto& r : baselines) {
      for (const auto& s : r.scores) {
        if (!s.topic_id && s.value) values[config_label(r.model_name, r.dataset_name, r.num_topics)][std::string(to_string(s.metric))] = *s.value;
      }
    }
  } else {
    std::map<std::pair<std::string, std::string>, std::vector<double>> doc_scores;
    for (const auto& s : scores) {
      if (!s.value) continue;
      const auto cfg = config_label(s.model, s.dataset, s.k);
      const auto column = s.metric + "@" + s.llm;
      if (s.scope == "per-topic" && s.target.starts_with("topic:")) {
        values[cfg + "#" + s.target.substr(6)][column] = *s.value;
      } else if (s.scope == "per-doc-topic") {
        const auto at = s.target.rfind('@');
        if (at != std::string::npos) doc_scores[{cfg + "#" + s.target.substr(at + 1), column}].push_back(*s.value);
      }
    }
    for (const auto& [key, v] : doc_scores) values[key.first][key.second] = *mean_of(v);
    for (const auto& r : baselines) {
      for (const auto& s : r.scores) {
        if (s.topic_id && s.value) {
          values[config_label(r.model_name, r.dataset_name, r.num_topics) + "#" + std::to_string(*s.topic_id)]
                [std::string(to_string(s.metric))] = *s.value;
        }
      }
    }
  }
  for (const auto& [row, cols] : values) {
    m.add_row(row);
    for (const auto& [col, v] : cols) {
      if (std::find(m.columns.begin(), m.columns.end(), col) != m.columns.end()) m.set(row, col, v);
    }
  }
  return m;
}

std::vector<std::pair<std::string, std::string>> base_large_pairs(const std::vector<std::string>& llm_ids) {
  std::set<std::string> ids(llm_ids.begin(), llm_ids.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& id : ids) {
    if (ids.contains(id + "-large")) out.emplace_back(id, id + "-large");
  }
  return out;
}

std::vector<AgreementRow> llm_agreement(const std::vector<ScoreRow>& scores,
                                        const std::vector<std::pair<std::string, std::string>>& families) {
  std::map<std::tuple<std::string, std::string, std::string>, double> lookup;  // (llm, metric, config)
  std::set<std::string> configs;
  for (const auto& s : scores) {
    if (!is_primary_model_level(s)) continue;
    const auto cfg = config_label(s.model, s.dataset, s.k);
    lookup[{s.llm, s.metric, cfg}] = *s.value;
    configs.insert(cfg);
  }
  std::vector<AgreementRow> out;
  for (const auto& [base, large] : families) {
    for (auto metric : kJudgeMetrics) {
      const std::string name(to_string(metric));
      std::vector<std::optional<double>> x;
      std::vector<std::optional<double>> y;
      bool any = false;
      for (const auto& cfg : configs) {
        auto a = lookup.find({base, name, cfg});
        auto b = lookup.find({large, name, cfg});
        x.push_back(a == lookup.end() ? std::nullopt : std::optional<double>(a->second));
        y.push_back(b == lookup.end() ? std::nullopt : std::optional<double>(b->second));
        any = any || (x.back() && y.back());
      }
      if (!any) continue;
      out.push_back({base, large, name, correlate(x, y, CorrMethod::kPearson), correlate(x, y, CorrMethod::kSpearman)});
    }
  }
  return out;
}

std::vector<PivotTable> comparison_report(const std::vector<ScoreRow>& scores) {
  std::vector<std::string> llms;
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  for (const auto& s : scores) {
    if (s.scope != "model-level") continue;
    push_unique(llms, s.llm);
    push_unique(models, s.model);
    push_unique(datasets, s.dataset);
  }

  struct RowSpec {
    MetricId metric;
    Aggregation agg;
    std::string label;
  };
  std::vector<RowSpec> specs;
  for (auto metric : kJudgeMetrics) {
    const auto o = is_lower_better(metric) ? Orientation::kLowerBetter : Orientation::kHigherBetter;
    specs.push_back({metric, primary_aggregation(metric),
                     std::string(to_string(metric)) + " (" + std::string(arrow(o)) + ")"});
    if (metric == MetricId::kAIrtw) {
      specs.push_back({metric, Aggregation::kMeanCount,
                       std::string(to_string(metric)) + "[mean-count] (" + std::string(arrow(o)) + ")"});
    }
  }

  auto build = [&](const std::string& title, auto&& include) {
    PivotTable t;
    t.title = title;
    t.column_labels = llms;
    for (const auto& spec : specs) {
      std::vector<std::optional<double>> row;
      bool any = false;
      for (const auto& llm : llms) {
        std::vector<double> v;
        for (const auto& s : scores) {
          if (s.scope == "model-level" && s.value && s.llm == llm && s.metric == to_string(spec.metric) &&
              s.aggregation == to_string(spec.agg) && include(s)) {
            v.push_back(*s.value);
          }
        }
        row.push_back(mean_of(v));
        any = any || row.back().has_value();
      }
      if (!any) continue;
      t.row_labels.push_back(spec.label);
      t.cells.push_back(std::move(row));
    }
    return t;
  };

  std::vector<PivotTable> out;
  out.push_back(build("overall", [](const ScoreRow&) { return true; }));
  for (const auto& model : models) {
    out.push_back(build("model=" + model, [&](const ScoreRow& s) { return s.model == model; }));
  }
  for (const auto& dataset : datasets) {
    out.push_back(build("dataset=" + dataset, [&](const ScoreRow& s) { return s.dataset == dataset; }));
  }
  return out;
}

AdversarialTable adversarial_table(const std::vector<AdversarialResult>& results) {
  AdversarialTable t;
  std::map<std::tuple<std::string, std::string, AdvTest>, std::pair<std::size_t, std::size_t>> pooled;
  for (const auto& r : results) {
    push_unique(t.llms, r.llm_id);
    push_unique(t.datasets, r.dataset);
    auto& p = pooled[{r.llm_id, r.dataset, r.test}];
    p.first += r.n_hits;
    p.second += r.n_cases;
  }
  for (auto test : {AdvTest::kNonword, AdvTest::kOutlier, AdvTest::kDuplicate}) {
    const bool present = std::any_of(results.begin(), results.end(), [&](const auto& r) { return r.test == test; });
    if (present) t.tests.push_back(test);
  }
  for (const auto& [key, p] : pooled) {
    if (p.second > 0) t.accuracy[key] = static_cast<double>(p.first) / static_cast<double>(p.second);
  }
  for (const auto& llm : t.llms) {
    std::vector<double> test_avgs;
    for (auto test : t.tests) {
      std::vector<double> v;
      for (const auto& ds : t.datasets) {
        auto it = t.accuracy.find({llm, ds, test});
        if (it != t.accuracy.end()) v.push_back(it->second);
      }
      if (auto avg = mean_of(v)) {
        t.test_average[{llm, test}] = *avg;
        test_avgs.push_back(*avg);
      }
    }
    if (auto overall = mean_of(test_avgs)) t.overall[llm] = *overall;
  }
  return t;
}

std::string to_csv(const CorrelationMatrix& m) {
  std::string out = "metric";
  for (const auto& l : m.labels) out += "," + csv_field(l);
  out += "\n";
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out += csv_field(m.labels[i]);
    for (std::size_t j = 0; j < m.labels.size(); ++j) out += "," + cell(m.r[i][j]);
    out += "\n";
  }
  return out;
}

std::string to_csv(const PivotTable& t) {
  std::string out = "metric";
  for (const auto& c : t.column_labels) out += "," + csv_field(c);
  out += "\n";
  for (std::size_t i = 0; i < t.row_labels.size(); ++i) {
    out += csv_field(t.row_labels[i]);
    for (const auto& v : t.cells[i]) out += "," + cell(v);
    out += "\n";
  }
  return out;
}

std::string to_csv(const AdversarialTable& t) {
  std::string out = "llm";
  for (auto test : t.tests) {
    for (const auto& ds : t.datasets) out += "," + csv_field(std::string(to_string(test)) + ":" + ds);
    out += "," + std::string(to_string(test)) + ":avg";
  }
  out += ",overall\n";
  for (const auto& llm : t.llms) {
    out += csv_field(llm);
    for (auto test : t.tests) {
      for (const auto& ds : t.datasets) {
        auto it = t.accuracy.find({llm, ds, test});
        out += "," + (it == t.accuracy.end() ? std::string() : format_double(it->second));
      }
      auto it = t.test_average.find({llm, test});
      out += "," + (it == t.test_average.end() ? std::string() : format_double(it->second));
    }
    auto it = t.overall.find(llm);
    out += "," + (it == t.overall.end() ? std::string() : format_double(it->second)) + "\n";
  }
  return out;
}

std::string agreement_csv(const std::vector<AgreementRow>& rows) {
  std::string out = "base_llm,large_llm,metric,pearson,spearman,n_used,pearson_ge_threshold,spearman_ge_threshold\n";
  auto flag = [](const PairedCorrelation& c) {
    return c.r ? std::string(*c.r >= kSubstitutionThreshold ? "yes" : "no") : std::string();
  };
  for (const auto& r : rows) {
    out += csv_field(r.base_llm) + "," + csv_field(r.large_llm) + "," + r.metric + "," + cell(r.pearson.r) + "," +
           cell(r.spearman.r) + "," + std::to_string(r.pearson.n_used) + "," + flag(r.pearson) + "," +
           flag(r.spearman) + "\n";
  }
  return out;
}

std::string to_csv(const MetricMatrix& m) {
  std::string out = "unit";
  for (const auto& c : m.columns) out += "," + csv_field(c);
  out += "\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out += csv_field(m.rows[i]);
    for (const auto& v : m.cells[i]) out += "," + cell(v);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const CorrelationMatrix& m) {
  nlohmann::json r = nlohmann::json::array();
  for (const auto& row : m.r) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& v : row) jr.push_back(cell_json(v));
    r.push_back(jr);
  }
  return {{"method", to_string(m.method)}, {"labels", m.labels}, {"r", r}, {"n_used", m.n_used}};
}

nlohmann::json to_json(const PivotTable& t) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& row : t.cells) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& v : row) jr.push_back(cell_json(v));
    cells.push_back(jr);
  }
  return {{"title", t.title}, {"rows", t.row_labels}, {"columns", t.column_labels}, {"cells", cells}};
}

nlohmann::json to_json(const AdversarialTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& llm : t.llms) {
    nlohmann::json row = {{"llm", llm}};
    for (auto test : t.tests) {
      nlohmann::json per = nlohmann::json::object();
      for (const auto& ds : t.datasets) {
        auto it = t.accuracy.find({llm, ds, test});
        if (it != t.accuracy.end()) per[ds] = it->second;
      }
      auto avg = t.test_average.find({llm, test});
      if (avg != t.test_average.end()) per["avg"] = avg->second;
      row[std::string(to_string(test))] = per;
    }
    auto it = t.overall.find(llm);
    row["overall"] = it == t.overall.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
    rows.push_back(row);
  }
  return {{"datasets", t.datasets}, {"rows", rows}};
}

nlohmann::json to_json(const MetricMatrix& m) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& row : m.cells) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& v : row) jr.push_back(cell_json(v));
    cells.push_back(jr);
  }
  nlohmann::json orient = nlohmann::json::object();
  for (const auto& [c, o] : m.orientation) orient[c] = o == Orientation::kHigherBetter ? "higher-better" : "lower-better";
  return {{"rows", m.rows}, {"columns", m.columns}, {"orientation", orient}, {"cells", cells}};
}

nlohmann::json agreement_json(const std::vector<AgreementRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"base_llm", r.base_llm},
                   {"large_llm", r.large_llm},
                   {"metric", r.metric},
                   {"pearson", cell_json(r.pearson.r)},
                   {"spearman", cell_json(r.spearman.r)},
                   {"n_used", r.pearson.n_used},
                   {"threshold", kSubstitutionThreshold}});
  }
  return out;
}

}  // namespace topiceval
