#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topiceval/corpus_prep.hpp"
#include "topiceval/diagnostics.hpp"
#include "topiceval/interchange.hpp"

namespace topiceval {

enum class BaselineMetric { kUMass, kUCI, kNPMI, kCV, kTD, kTU, kTR, kIRBO };

inline constexpr std::array<BaselineMetric, 8> kAllBaselineMetrics = {
    BaselineMetric::kUMass, BaselineMetric::kUCI, BaselineMetric::kNPMI, BaselineMetric::kCV,
    BaselineMetric::kTD,    BaselineMetric::kTU,  BaselineMetric::kTR,   BaselineMetric::kIRBO};

// The five metrics averaged when choosing a hyperparameter configuration.
inline constexpr std::array<BaselineMetric, 5> kSelectionMetrics = {
    BaselineMetric::kUMass, BaselineMetric::kNPMI, BaselineMetric::kCV, BaselineMetric::kTU,
    BaselineMetric::kIRBO};

std::string_view to_string(BaselineMetric m);
// Accepts "C_UMass" or the short forms "umass", "uci", "npmi", "cv", "td", "tu", "tr", "irbo".
std::optional<BaselineMetric> parse_baseline_metric(std::string_view name);
bool is_lower_better(BaselineMetric m);
bool is_coherence(BaselineMetric m);

struct BaselineParams {
  std::size_t window_uci = 10;
  std::size_t window_cv = 110;
  double rbo_p = 0.9;
  std::size_t top_k = 10;
  int threads = 1;
  std::vector<BaselineMetric> metrics{kAllBaselineMetrics.begin(), kAllBaselineMetrics.end()};
};

struct BaselineScore {
  BaselineMetric metric = BaselineMetric::kUMass;
  std::optional<int> topic_id;  // unset for model-level scores
  std::optional<double> value;  // unset when undefined
  std::map<std::string, std::string> params;
};

struct BaselineReport {
  std::string model_name;
  std::string dataset_name;
  int num_topics = 0;
  std::vector<BaselineScore> scores;

  std::optional<double> model_level(BaselineMetric m) const;
};

// `docs` are tokenized documents; tokens outside `vocab` are ignored.
// Coherence metrics are reported per topic and as the mean over topics with a
// defined score; diversity metrics are model-level only.
BaselineReport evaluate_baselines(const TopicModelOutput& model, const std::vector<TokenList>& docs,
                                  const std::vector<std::string>& vocab, const BaselineParams& params,
                                  Diagnostics* diag = nullptr);

// CSV columns: model,dataset,k,scope,topic_id,metric,value,params
std::string baseline_csv_header();
std::string baseline_csv_rows(const BaselineReport& report);
std::vector<BaselineReport> parse_baseline_csv(std::string_view csv);

// Arithmetic mean of the five selection metrics.
double config_score(const std::array<double, 5>& selection_scores);

struct RankedConfig {
  std::string label;
  double score = 0.0;
};

struct ConfigCandidate {
  std::string label;
  std::map<BaselineMetric, double> scores;
};

// Ranks by mean selection score, descending; ties keep input order.
// Candidates missing any selection metric are excluded with a warning. With
// `normalized`, each metric is first min-max scaled across candidates.
std::vector<RankedConfig> rank_configurations(const std::vector<ConfigCandidate>& candidates,
                                              bool normalized = false, Diagnostics* diag = nullptr);

}  // namespace topiceval
