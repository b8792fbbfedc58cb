#include "topiceval/baseline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "topiceval/coherence.hpp"
#include "topiceval/cooccurrence.hpp"
#include "topiceval/diversity.hpp"
#include "topiceval/parallel.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace {

struct BaselineName {
  BaselineMetric metric;
  std::string_view canonical;
  std::string_view short_name;
};

constexpr std::array<BaselineName, 8> kBaselineNames = {{
    {BaselineMetric::kUMass, "C_UMass", "umass"},
    {BaselineMetric::kUCI, "C_UCI", "uci"},
    {BaselineMetric::kNPMI, "C_NPMI", "npmi"},
    {BaselineMetric::kCV, "C_V", "cv"},
    {BaselineMetric::kTD, "D_TD", "td"},
    {BaselineMetric::kTU, "D_TU", "tu"},
    {BaselineMetric::kTR, "D_TR", "tr"},
    {BaselineMetric::kIRBO, "D_IRBO", "irbo"},
}};

std::string params_to_string(const std::map<std::string, std::string>& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::map<std::string, std::string> params_from_string(std::string_view s) {
  std::map<std::string, std::string> out;
  if (trim(s).empty()) return out;
  for (const auto& kv : split(s, ';')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(BaselineMetric m) {
  for (const auto& n : kBaselineNames) {
    if (n.metric == m) return n.canonical;
  }
  return "unknown";
}

std::optional<BaselineMetric> parse_baseline_metric(std::string_view name) {
  const auto folded = fold_case(name);
  for (const auto& n : kBaselineNames) {
    if (name == n.canonical || folded == n.short_name || folded == fold_case(n.canonical)) {
      return n.metric;
    }
  }
  return std::nullopt;
}

bool is_lower_better(BaselineMetric m) { return m == BaselineMetric::kTR; }

bool is_coherence(BaselineMetric m) {
  return m == BaselineMetric::kUMass || m == BaselineMetric::kUCI || m == BaselineMetric::kNPMI ||
         m == BaselineMetric::kCV;
}

std::optional<double> BaselineReport::model_level(BaselineMetric m) const {
  for (const auto& s : scores) {
    if (s.metric == m && !s.topic_id) return s.value;
  }
  return std::nullopt;
}

BaselineReport evaluate_baselines(const TopicModelOutput& model, const std::vector<TokenList>& docs,
                                  const std::vector<std::string>& vocab, const BaselineParams& params,
                                  Diagnostics* diag) {
  BaselineReport report;
  report.model_name = model.model_name;
  report.dataset_name = model.dataset_name;
  report.num_topics = model.num_topics;

  std::size_t top_k = params.top_k;
  for (const auto& t : model.topics) {
    if (t.words.size() < top_k) {
      warn(diag, "topic " + std::to_string(t.topic_id) + " has only " + std::to_string(t.words.size()) +
                     " words; top-k reduced from " + std::to_string(top_k));
      top_k = t.words.size();
    }
  }
  WordLists lists;
  for (const auto& t : model.topics) {
    lists.emplace_back(t.words.begin(), t.words.begin() + static_cast<std::ptrdiff_t>(top_k));
  }

  auto wants = [&](BaselineMetric m) {
    return std::find(params.metrics.begin(), params.metrics.end(), m) != params.metrics.end();
  };
  const std::string k_str = std::to_string(top_k);

  std::unordered_set<std::string> targets;
  for (const auto& l : lists) targets.insert(l.begin(), l.end());
  CountOptions copts;
  copts.threads = params.threads;
  copts.targets = targets;

  struct CoherenceJob {
    BaselineMetric metric;
    CountMode mode;
    std::optional<double> (*fn)(const std::vector<std::string>&, const CooccurrenceCounts&, Diagnostics*);
    std::map<std::string, std::string> params;
  };
  std::vector<CoherenceJob> jobs;
  if (wants(BaselineMetric::kUMass)) {
    jobs.push_back({BaselineMetric::kUMass, CountMode::document(), c_umass,
                    {{"unit", "document"}, {"smoothing", "1"}, {"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kUCI)) {
    jobs.push_back({BaselineMetric::kUCI, CountMode::sliding(params.window_uci), c_uci,
                    {{"window", std::to_string(params.window_uci)}, {"epsilon", "1e-12"}, {"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kNPMI)) {
    jobs.push_back({BaselineMetric::kNPMI, CountMode::sliding(params.window_uci), c_npmi,
                    {{"window", std::to_string(params.window_uci)}, {"epsilon", "1e-12"}, {"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kCV)) {
    jobs.push_back({BaselineMetric::kCV, CountMode::sliding(params.window_cv), c_v,
                    {{"window", std::to_string(params.window_cv)},
                     {"variant", "one-set/npmi-vector/cosine"},
                     {"top_k", k_str}}});
  }

  // One count table per distinct counting mode.
  std::map<std::pair<int, std::size_t>, CooccurrenceCounts> tables;
  for (const auto& job : jobs) {
    const auto key = std::make_pair(static_cast<int>(job.mode.kind), job.mode.window);
    if (!tables.contains(key)) tables.emplace(key, count_cooccurrences(docs, vocab, job.mode, copts));
  }

  for (const auto& job : jobs) {
    const auto& counts = tables.at({static_cast<int>(job.mode.kind), job.mode.window});
    std::vector<std::optional<double>> per_topic(lists.size());
    parallel_for(lists.size(), params.threads,
                 [&](std::size_t i) { per_topic[i] = job.fn(lists[i], counts, diag); });
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      report.scores.push_back({job.metric, model.topics[i].topic_id, per_topic[i], job.params});
      if (per_topic[i]) {
        sum += *per_topic[i];
        ++defined;
      }
    }
    std::optional<double> mean;
    if (defined > 0) mean = sum / static_cast<double>(defined);
    report.scores.push_back({job.metric, std::nullopt, mean, job.params});
  }

  if (wants(BaselineMetric::kTD)) {
    report.scores.push_back({BaselineMetric::kTD, std::nullopt, topic_diversity_td(lists, top_k), {{"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kTU)) {
    report.scores.push_back({BaselineMetric::kTU, std::nullopt, topic_uniqueness_tu(lists, top_k), {{"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kTR)) {
    report.scores.push_back({BaselineMetric::kTR, std::nullopt, topic_redundancy_tr(lists, top_k), {{"top_k", k_str}}});
  }
  if (wants(BaselineMetric::kIRBO)) {
    report.scores.push_back({BaselineMetric::kIRBO, std::nullopt, irbo(lists, top_k, params.rbo_p),
                             {{"top_k", k_str}, {"p", format_double(params.rbo_p)}}});
  }
  return report;
}

std::string baseline_csv_header() { return "model,dataset,k,scope,topic_id,metric,value,params\n"; }

std::string baseline_csv_rows(const BaselineReport& report) {
  std::string out;
  for (const auto& s : report.scores) {
    out += csv_field(report.model_name) + "," + csv_field(report.dataset_name) + "," +
           std::to_string(report.num_topics) + "," + (s.topic_id ? "topic" : "model") + "," +
           (s.topic_id ? std::to_string(*s.topic_id) : "") + "," + std::string(to_string(s.metric)) + "," +
           (s.value ? format_double(*s.value) : "") + "," + csv_field(params_to_string(s.params)) + "\n";
  }
  return out;
}

std::vector<BaselineReport> parse_baseline_csv(std::string_view csv) {
  std::vector<BaselineReport> out;
  const auto lines = split_lines(csv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const auto f = parse_csv_line(lines[n]);
    if (n == 0 && !f.empty() && f[0] == "model") continue;
    const std::string where = "baseline.csv:" + std::to_string(n + 1);
    if (f.size() != 8) throw ValidationError(where, "expected 8 columns");
    const auto metric = parse_baseline_metric(f[5]);
    if (!metric) throw ValidationError(where, "unknown metric '" + f[5] + "'");
    int k = 0;
    try {
      k = std::stoi(f[2]);
    } catch (const std::exception&) {
      throw ValidationError(where, "bad k '" + f[2] + "'");
    }
    auto it = std::find_if(out.begin(), out.end(), [&](const BaselineReport& r) {
      return r.model_name == f[0] && r.dataset_name == f[1] && r.num_topics == k;
    });
    if (it == out.end()) {
      out.push_back({f[0], f[1], k, {}});
      it = out.end() - 1;
    }
    BaselineScore s;
    s.metric = *metric;
    if (f[3] == "topic") s.topic_id = std::stoi(f[4]);
    if (!f[6].empty()) s.value = std::stod(f[6]);
    s.params = params_from_string(f[7]);
    it->scores.push_back(std::move(s));
  }
  return out;
}

double config_score(const std::array<double, 5>& s) {
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<RankedConfig> rank_configurations(const std::vector<ConfigCandidate>& candidates,
                                              bool normalized, Diagnostics* diag) {
  std::vector<const ConfigCandidate*> usable;
  for (const auto& c : candidates) {
    const bool complete = std::all_of(kSelectionMetrics.begin(), kSelectionMetrics.end(),
                                      [&](BaselineMetric m) { return c.scores.contains(m); });
    if (!complete) {
      warn(diag, "configuration '" + c.label + "' lacks a selection metric; excluded from ranking");
      continue;
    }
    usable.push_back(&c);
  }

  std::array<double, 5> lo{};
  std::array<double, 5> hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto* c : usable) {
    for (std::size_t m = 0; m < kSelectionMetrics.size(); ++m) {
      const double v = c->scores.at(kSelectionMetrics[m]);
      lo[m] = std::min(lo[m], v);
      hi[m] = std::max(hi[m], v);
    }
  }

  std::vector<RankedConfig> ranked;
  for (const auto* c : usable) {
    std::array<double, 5> s{};
    for (std::size_t m = 0; m < kSelectionMetrics.size(); ++m) {
      s[m] = c->scores.at(kSelectionMetrics[m]);
      if (normalized) s[m] = hi[m] > lo[m] ? (s[m] - lo[m]) / (hi[m] - lo[m]) : 0.0;
    }
    ranked.push_back({c->label, config_score(s)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedConfig& a, const RankedConfig& b) { return a.score > b.score; });
  return ranked;
}

}  // namespace topiceval
