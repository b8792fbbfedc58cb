#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiceval/diagnostics.hpp"
#include "topiceval/interchange.hpp"
#include "topiceval/lexicon.hpp"
#include "topiceval/llm_metrics.hpp"
#include "topiceval/random.hpp"

namespace topiceval {

enum class AdvTest { kNonword, kOutlier, kDuplicate };

MetricId metric_of(AdvTest test);
std::string_view to_string(AdvTest test);            // "AdvT_nonword", ...
std::optional<AdvTest> parse_adv_test(std::string_view name);  // also "nonword", ...

enum class PerturbCategory { kGarble, kAbbreviation, kCharSubstitution, kIntruder, kDuplicate };
std::string_view to_string(PerturbCategory c);
std::optional<PerturbCategory> parse_perturb_category(std::string_view name);

struct AdversarialCase {
  std::string case_id;
  Topic base_topic;
  std::vector<std::string> perturbed_words;  // base words with `injected` at `position`
  std::string injected;
  std::optional<std::string> anchor;  // duplicate cases only
  PerturbCategory category = PerturbCategory::kGarble;
  std::uint64_t seed = 0;
  std::size_t position = 0;

  bool operator==(const AdversarialCase&) const = default;
};

// Throws ValidationError when a case breaks its ground-truth invariants.
void validate_case(const AdversarialCase& c);

nlohmann::json to_json(const AdversarialCase& c);
AdversarialCase case_from_json(const nlohmann::json& j);
std::string serialize_cases(const std::vector<AdversarialCase>& cases);
std::vector<AdversarialCase> parse_cases(std::string_view jsonl);  // validates every case
std::vector<AdversarialCase> load_cases(const std::string& path);

// Up to n topics drawn uniformly without replacement; with a smaller pool
// every topic is returned (in pool order) and a warning is recorded.
std::vector<Topic> sample_adversarial_topics(const std::vector<Topic>& pool, std::size_t n, std::uint64_t seed,
                                             Diagnostics* diag = nullptr);

// Perturbation primitives, exposed for testing.
std::string garble(std::string_view word, Rng& rng);
std::string drop_vowels(std::string_view word);  // keeps the first letter
std::string abbreviate(std::string_view word, Rng& rng);
std::string substitute_chars(std::string_view word, Rng& rng);

using Vocabulary = std::unordered_set<std::string>;  // case-folded

std::optional<AdversarialCase> gen_nonword_case(const Topic& topic, Rng& rng, const Vocabulary& vocab,
                                                Diagnostics* diag = nullptr);
std::optional<AdversarialCase> gen_outlier_case(const Topic& topic, const std::vector<Topic>& donor_pool, Rng& rng,
                                                Diagnostics* diag = nullptr);
std::optional<AdversarialCase> gen_duplicate_case(const Topic& topic, const SynonymLexicon& lexicon, Rng& rng,
                                                  Diagnostics* diag = nullptr);

struct CaseGenerationInputs {
  std::vector<Topic> donor_pool;  // outlier donors
  Vocabulary vocab;               // nonword rejection set
  SynonymLexicon lexicon = SynonymLexicon::builtin();
};

// One case per topic (skipped topics are warned about), each from its own
// seed stream so a case does not depend on the ones before it.
std::vector<AdversarialCase> generate_cases(AdvTest test, const std::vector<Topic>& topics,
                                            const CaseGenerationInputs& inputs, std::uint64_t seed,
                                            Diagnostics* diag = nullptr);

struct CaseOutcome {
  std::string case_id;
  bool hit = false;
  bool failed = false;  // fewer than a majority of valid samples
  int n_valid = 0;
  int sample_hits = 0;  // valid samples that named the injected item
};

struct AdversarialResult {
  AdvTest test = AdvTest::kNonword;
  std::string llm_id;
  std::string dataset;
  std::size_t n_cases = 0;
  std::size_t n_hits = 0;
  std::size_t n_failed = 0;
  double accuracy = 0.0;          // majority-vote hits / cases
  double per_run_accuracy = 0.0;  // mean over runs of single-sample hit rate
  std::vector<CaseOutcome> outcomes;
  std::vector<TargetJudgment> judgments;
};

// Hit rules: the injected token (nonword, outlier) or the unordered
// (anchor, injected) pair (duplicate) must survive the majority vote. Extra
// flagged items are ignored.
bool is_hit(AdvTest test, const AdversarialCase& c, const TargetJudgment& j);

AdversarialResult run_adversarial(const std::vector<AdversarialCase>& cases, AdvTest test, MetricEvaluator& eval,
                                  int threads = 1, Diagnostics* diag = nullptr);

std::string adversarial_csv_header();
std::string adversarial_csv_row(const AdversarialResult& r);
std::vector<AdversarialResult> parse_adversarial_csv(std::string_view csv);

}  // namespace topiceval
