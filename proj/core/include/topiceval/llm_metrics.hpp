#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topiceval/diagnostics.hpp"
#include "topiceval/gateway.hpp"
#include "topiceval/interchange.hpp"
#include "topiceval/judgment.hpp"
#include "topiceval/prompts.hpp"

namespace topiceval {

// Per-item vote counts over the valid samples of one judgment, in first-seen
// order (sample order, then position within the sample).
template <typename Item>
using VoteTally = std::vector<std::pair<Item, int>>;

VoteTally<std::string> tally_words(const std::vector<std::vector<std::string>>& samples);
VoteTally<WordPair> tally_pairs(const std::vector<std::vector<WordPair>>& samples);

template <typename Item>
std::vector<Item> majority_items(const VoteTally<Item>& tally, int n_samples) {
  std::vector<Item> out;
  for (const auto& [item, votes] : tally) {
    if (votes >= majority_threshold(n_samples)) out.push_back(item);
  }
  return out;
}

// Aggregated outcome for one (metric, target) under one judge.
struct TargetJudgment {
  MetricId metric_id = MetricId::kLRate;
  TargetRef target;
  std::string llm_id;
  std::vector<JudgmentRecord> records;  // every sample incl. failures and redraws
  int n_valid = 0;
  bool failed = false;
  std::optional<MetricScore> score;  // absent when failed

  VoteTally<std::string> word_votes;
  VoteTally<WordPair> pair_votes;
  std::vector<std::string> flagged;  // majority words
  std::vector<WordPair> flagged_pairs;
  // Mean per-sample list length; the sensitivity variant for A_ir-tw.
  std::optional<double> mean_count;
};

// Recomputes a judgment purely from its records: the first n_samples valid
// records by sample_index are used. Ratings average, word and pair sets take
// the per-item majority, themes average their per-sample counts.
TargetJudgment aggregate_records(MetricId metric, const TargetRef& target, const std::string& llm_id,
                                 std::vector<JudgmentRecord> records, int n_samples);

Scope scope_of(MetricId metric);

struct PairStrategy {
  bool all_pairs = true;
  std::size_t sample_n = 0;

  static PairStrategy parse(std::string_view text);  // "all" or "sample:N"
  std::string describe() const;
};

// Unordered topic-id pairs (a < b), sorted. Sampling is seeded and clamps
// n to K(K-1)/2 with a warning.
std::vector<std::pair<int, int>> select_topic_pairs(const TopicModelOutput& model, const PairStrategy& strategy,
                                                    std::uint64_t seed, Diagnostics* diag = nullptr);

struct DocumentTopicPair {
  std::string doc_id;
  int topic_id = 0;
  std::uint64_t sampling_seed = 0;
};

// Argmax topic per document (lowest id on ties; HARD labels as given).
std::map<std::string, int> primary_topics(const std::vector<DocTopicAssignment>& assignments);

// Up to per_topic documents per topic, drawn uniformly without replacement
// from the documents whose primary topic it is. Output is ordered by topic
// (model order) and then corpus order.
std::vector<DocumentTopicPair> sample_doc_topic_pairs(const TopicModelOutput& model, const Corpus& corpus,
                                                      const std::vector<DocTopicAssignment>& assignments,
                                                      std::size_t per_topic, std::uint64_t seed,
                                                      Diagnostics* diag = nullptr);

// Issues the prompts for single targets through a gateway.
class MetricEvaluator {
 public:
  MetricEvaluator(Gateway& gateway, const PromptLibrary& prompts) : gateway_(gateway), prompts_(prompts) {}

  // L_rate, L_nonword, C_rate, C_outlier, R_rate, R_duplicate.
  TargetJudgment eval_topic(MetricId metric, const Topic& topic);
  // D_rate for one unordered pair.
  TargetJudgment eval_pair(const Topic& a, const Topic& b);
  // A_ir-tw and A_missing-theme. `prompt_words` is normally the topic's own
  // words; the union variant passes the union of the document's topics.
  TargetJudgment eval_doc(MetricId metric, const Document& doc, int topic_id,
                          const std::vector<std::string>& prompt_words);
  // Word-set or pair-set judgment of an arbitrary word list; used by the
  // adversarial tests (slots may carry [ANCHOR]).
  TargetJudgment eval_words(MetricId metric, const TargetRef& target, const std::vector<std::string>& words,
                            SlotValues extra_slots = {});

  Gateway& gateway() { return gateway_; }

 private:
  TargetJudgment run(MetricId metric, const TargetRef& target, const SlotValues& slots,
                     const std::vector<std::string>& reference);

  Gateway& gateway_;
  const PromptLibrary& prompts_;
};

struct JudgeOptions {
  std::vector<MetricId> metrics{kJudgeMetrics.begin(), kJudgeMetrics.end()};
  PairStrategy pairs;
  std::size_t per_topic_docs = 5;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: the judge's max_in_flight
  bool missing_theme_union = false;
  double union_min_weight = 0.1;
};

struct ModelLevelScore {
  MetricId metric_id = MetricId::kLRate;
  Aggregation aggregation = Aggregation::kMean;
  std::optional<double> value;  // absent when every target failed
  std::size_t n_targets = 0;
  std::size_t n_failed = 0;
};

// Unweighted mean over targets; failed judgments are excluded and counted.
// For A_ir-tw a second, mean-count score is produced alongside.
std::vector<ModelLevelScore> aggregate_model_level(const std::vector<TargetJudgment>& judgments);

struct JudgeRun {
  std::string model_name;
  std::string dataset_name;
  int num_topics = 0;
  std::string llm_id;
  int n_samples = 5;
  std::vector<TargetJudgment> judgments;  // deterministic task order
  std::vector<ModelLevelScore> model_level;
  std::vector<DocumentTopicPair> doc_pairs;
};

// Evaluates the selected metrics on one topic set. corpus/assignments are
// needed only for the alignment metrics.
JudgeRun evaluate_model(const TopicModelOutput& model, const Corpus* corpus,
                        const std::vector<DocTopicAssignment>* assignments, Gateway& gateway,
                        const PromptLibrary& prompts, const JudgeOptions& options, Diagnostics* diag = nullptr);

// scores.csv: per-target rows followed by model-level rows.
struct ScoreRow {
  std::string model;
  std::string dataset;
  int k = 0;
  std::string llm;
  std::string metric;
  std::string scope;
  std::string target;
  std::optional<double> value;
  std::string aggregation;
  int n_valid_samples = 0;
  std::size_t n_targets = 0;
  std::size_t n_failed = 0;
};

std::string scores_csv_header();
std::string scores_csv_rows(const JudgeRun& run);
std::vector<ScoreRow> parse_scores_csv(std::string_view csv);

// One JSON object per target with the flagged items and their vote counts.
std::string flagged_jsonl(const JudgeRun& run);

}  // namespace topiceval
