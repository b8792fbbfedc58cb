#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "topiceval/adversarial.hpp"
#include "topiceval/text.hpp"

using namespace topiceval;
using namespace topiceval::testing;

namespace {

constexpr AdvTest kTests[] = {AdvTest::kNonword, AdvTest::kOutlier, AdvTest::kDuplicate};

CaseGenerationInputs inputs_for(const std::vector<Topic>& pool) {
  CaseGenerationInputs in;
  in.donor_pool = pool;
  for (const auto& t : pool) {
    for (const auto& w : t.words) in.vocab.insert(fold_case(w));
  }
  return in;
}

std::vector<AdversarialCase> hundred_cases(AdvTest test, std::uint64_t seed) {
  const auto pool = themed_topic_pool(200, seed);
  auto cases = generate_cases(test, pool, inputs_for(pool), seed);
  if (cases.size() > 100) cases.resize(100);
  return cases;
}

AdversarialResult run_with(const std::vector<AdversarialCase>& cases, AdvTest test, bool correct) {
  LlmConfig cfg;
  cfg.llm_id = correct ? "oracle" : "contrarian";
  cfg.endpoint_url = "mock://case-aware";
  cfg.model_identifier = "m";
  auto backend = std::make_shared<CaseAwareJudge>(cases, correct);
  Gateway gw(cfg, backend);
  const PromptLibrary prompts;
  MetricEvaluator eval(gw, prompts);
  return run_adversarial(cases, test, eval, 2);
}

}  // namespace

TEST(Adversarial, OracleJudgeScoresOneContrarianZero) {
  for (auto test : kTests) {
    const auto cases = hundred_cases(test, 17);
    ASSERT_EQ(cases.size(), 100u) << to_string(test);
    const auto good = run_with(cases, test, true);
    EXPECT_EQ(good.n_cases, 100u);
    EXPECT_DOUBLE_EQ(good.accuracy, 1.0) << to_string(test);
    EXPECT_DOUBLE_EQ(good.per_run_accuracy, 1.0) << to_string(test);
    const auto bad = run_with(cases, test, false);
    EXPECT_DOUBLE_EQ(bad.accuracy, 0.0) << to_string(test);
    EXPECT_DOUBLE_EQ(bad.per_run_accuracy, 0.0) << to_string(test);
  }
}

TEST(Adversarial, CaseInvariantsHold) {
  for (auto test : kTests) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto pool = themed_topic_pool(120, seed);
      const auto in = inputs_for(pool);
      for (const auto& c : generate_cases(test, pool, in, seed)) {
        const auto& base = c.base_topic.words;
        EXPECT_EQ(std::count(base.begin(), base.end(), c.injected), 0) << c.case_id;
        EXPECT_EQ(c.perturbed_words.size(), base.size() + 1) << c.case_id;
        ASSERT_LT(c.position, c.perturbed_words.size());
        EXPECT_EQ(c.perturbed_words[c.position], c.injected);
        // Removing the injected word gives back the base topic in order.
        auto without = c.perturbed_words;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(c.position));
        EXPECT_EQ(without, base);
        if (test == AdvTest::kNonword) EXPECT_FALSE(in.vocab.contains(fold_case(c.injected))) << c.injected;
        if (test == AdvTest::kDuplicate) {
          ASSERT_TRUE(c.anchor);
          EXPECT_EQ(std::count(base.begin(), base.end(), *c.anchor), 1);
          EXPECT_TRUE(in.lexicon.same_concept(*c.anchor, c.injected));
        }
        if (test == AdvTest::kOutlier) {
          EXPECT_EQ(c.category, PerturbCategory::kIntruder);
        }
        EXPECT_NO_THROW(validate_case(c));
      }
    }
  }
}

TEST(Adversarial, GenerationIsDeterministicPerCase) {
  const auto pool = themed_topic_pool(30, 4);
  const auto in = inputs_for(pool);
  const auto a = generate_cases(AdvTest::kNonword, pool, in, 99);
  EXPECT_EQ(a, generate_cases(AdvTest::kNonword, pool, in, 99));
  // A case does not depend on the topics before it.
  const std::vector<Topic> tail(pool.begin() + 1, pool.end());
  const auto b = generate_cases(AdvTest::kNonword, tail, in, 99);
  EXPECT_NE(a.at(1).seed, 0u);
  EXPECT_NE(a, b);
}

TEST(Adversarial, ValidateCaseRejectsBrokenInvariants) {
  const auto pool = themed_topic_pool(10, 8);
  auto c = generate_cases(AdvTest::kOutlier, pool, inputs_for(pool), 8).at(0);
  auto broken = c;
  broken.injected = broken.base_topic.words[0];
  EXPECT_THROW(validate_case(broken), ValidationError);
  broken = c;
  broken.position = broken.perturbed_words.size();
  EXPECT_THROW(validate_case(broken), ValidationError);
  broken = c;
  broken.perturbed_words.pop_back();
  EXPECT_THROW(validate_case(broken), ValidationError);
}

TEST(Adversarial, CasesJsonlRoundTrip) {
  const auto pool = themed_topic_pool(40, 6);
  for (auto test : kTests) {
    const auto cases = generate_cases(test, pool, inputs_for(pool), 6);
    ASSERT_FALSE(cases.empty());
    EXPECT_EQ(parse_cases(serialize_cases(cases)), cases);
  }
}

TEST(Adversarial, TopicSamplingInclusionIsUniform) {
  const auto pool = themed_topic_pool(20, 1);
  std::map<int, int> hits;
  const int trials = 5000;
  for (int t = 0; t < trials; ++t) {
    const auto s = sample_adversarial_topics(pool, 5, static_cast<std::uint64_t>(t));
    ASSERT_EQ(s.size(), 5u);
    std::set<int> ids;
    for (const auto& topic : s) ids.insert(topic.topic_id);
    ASSERT_EQ(ids.size(), 5u);
    for (int id : ids) ++hits[id];
  }
  const double p = 5.0 / 20.0;
  const double sigma = std::sqrt(trials * p * (1 - p));
  for (const auto& topic : pool) EXPECT_NEAR(hits[topic.topic_id], trials * p, 4 * sigma) << topic.topic_id;
}

TEST(Adversarial, SmallPoolReturnsAllWithWarning) {
  const auto pool = themed_topic_pool(3, 1);
  Diagnostics diag;
  const auto s = sample_adversarial_topics(pool, 100, 5, &diag);
  EXPECT_EQ(s, pool);
  EXPECT_EQ(diag.count(), 1u);
}

TEST(Perturbations, DropVowelsKeepsFirstLetter) {
  EXPECT_EQ(drop_vowels("government"), "gvrnmnt");
  EXPECT_EQ(drop_vowels("apple"), "appl");
}

TEST(Perturbations, PrimitivesChangeTheWord) {
  Rng rng(3);
  for (const char* w : {"telescope", "hospital", "election", "orchestra"}) {
    EXPECT_NE(garble(w, rng), w);
    EXPECT_NE(substitute_chars(w, rng), w);
    const auto abbr = abbreviate(w, rng);
    EXPECT_NE(abbr, w);
    EXPECT_LT(abbr.size(), std::string_view(w).size());
  }
}

TEST(Adversarial, HitRuleIgnoresExtraItems) {
  const auto pool = themed_topic_pool(5, 2);
  const auto c = generate_cases(AdvTest::kOutlier, pool, inputs_for(pool), 2).at(0);
  TargetJudgment j;
  j.flagged = {c.base_topic.words[0], c.injected};
  EXPECT_TRUE(is_hit(AdvTest::kOutlier, c, j));
  j.flagged = {c.base_topic.words[0]};
  EXPECT_FALSE(is_hit(AdvTest::kOutlier, c, j));
}

TEST(Adversarial, CsvRoundTrip) {
  const auto cases = hundred_cases(AdvTest::kOutlier, 3);
  auto r = run_with(cases, AdvTest::kOutlier, true);
  r.dataset = "toy";
  const auto parsed = parse_adversarial_csv(adversarial_csv_header() + adversarial_csv_row(r));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].test, AdvTest::kOutlier);
  EXPECT_EQ(parsed[0].llm_id, "oracle");
  EXPECT_EQ(parsed[0].dataset, "toy");
  EXPECT_EQ(parsed[0].n_cases, 100u);
  EXPECT_DOUBLE_EQ(parsed[0].accuracy, 1.0);
}

TEST(Adversarial, Names) {
  for (auto t : kTests) EXPECT_EQ(parse_adv_test(to_string(t)), t);
  EXPECT_EQ(parse_adv_test("outlier"), AdvTest::kOutlier);
  EXPECT_EQ(metric_of(AdvTest::kDuplicate), MetricId::kAdvDuplicate);
  EXPECT_FALSE(parse_adv_test("typo"));
}
