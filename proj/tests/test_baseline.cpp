#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "topiceval/baseline.hpp"
#include "topiceval/coherence.hpp"
#include "topiceval/cooccurrence.hpp"
#include "topiceval/text.hpp"

using namespace topiceval;
using namespace topiceval::testing;

namespace {

TopicModelOutput fruit_model() {
  TopicModelOutput m;
  m.model_name = "lda";
  m.dataset_name = "fruit";
  m.num_topics = 2;
  m.topics = {{0, {"apple", "banana", "cherry", "date"}, std::nullopt},
              {1, {"fig", "grape", "apple", "kiwi"}, std::nullopt}};
  return m;
}

BaselineParams fruit_params() {
  BaselineParams p;
  p.top_k = 4;
  p.window_uci = 3;
  p.window_cv = 5;
  return p;
}

std::optional<double> topic_value(const BaselineReport& r, BaselineMetric m, int topic) {
  for (const auto& s : r.scores) {
    if (s.metric == m && s.topic_id == topic) return s.value;
  }
  return std::nullopt;
}

}  // namespace

TEST(Baseline, CoherenceMatchesBruteForceOracles) {
  const auto docs = fixture_docs();
  const auto vocab = fixture_vocab();
  const auto model = fruit_model();
  const auto report = evaluate_baselines(model, docs, vocab, fruit_params());

  const auto doc_counts = brute_force_counts(docs, vocab, 0);
  const auto win_counts = brute_force_counts(docs, vocab, 3);
  for (const auto& t : model.topics) {
    EXPECT_NEAR(*topic_value(report, BaselineMetric::kUMass, t.topic_id), oracle_umass(t.words, doc_counts), 1e-9);
    EXPECT_NEAR(*topic_value(report, BaselineMetric::kUCI, t.topic_id), oracle_uci(t.words, win_counts), 1e-9);
    EXPECT_NEAR(*topic_value(report, BaselineMetric::kNPMI, t.topic_id), oracle_npmi(t.words, win_counts), 1e-9);
  }
  // Model level is the mean over topics.
  const double umass_mean = (*topic_value(report, BaselineMetric::kUMass, 0) +
                             *topic_value(report, BaselineMetric::kUMass, 1)) / 2.0;
  EXPECT_NEAR(*report.model_level(BaselineMetric::kUMass), umass_mean, 1e-12);
}

TEST(Baseline, CvUsesItsOwnWindow) {
  const auto docs = fixture_docs();
  const auto vocab = fixture_vocab();
  const auto report = evaluate_baselines(fruit_model(), docs, vocab, fruit_params());
  const auto counts = count_cooccurrences(docs, vocab, CountMode::sliding(5));
  EXPECT_NEAR(*topic_value(report, BaselineMetric::kCV, 0), *c_v(fruit_model().topics[0].words, counts), 1e-12);
}

TEST(Baseline, DiversityClosedForms) {
  const auto report = evaluate_baselines(fruit_model(), fixture_docs(), fixture_vocab(), fruit_params());
  // 7 distinct words in 8 slots; "apple" is shared by both topics.
  EXPECT_NEAR(*report.model_level(BaselineMetric::kTD), 7.0 / 8.0, 1e-12);
  EXPECT_NEAR(*report.model_level(BaselineMetric::kTU), (0.5 + 3.0) / 4.0, 1e-12);
  EXPECT_NEAR(*report.model_level(BaselineMetric::kTR), 2.0 / 8.0, 1e-12);
  const auto m = fruit_model();
  EXPECT_NEAR(*report.model_level(BaselineMetric::kIRBO), 1.0 - rbo_direct(m.topics[0].words, m.topics[1].words, 0.9),
              1e-12);
}

TEST(Baseline, ShortTopicsReduceTopKWithWarning) {
  auto model = fruit_model();
  model.topics[1].words.pop_back();
  Diagnostics diag;
  const auto report = evaluate_baselines(model, fixture_docs(), fixture_vocab(), fruit_params(), &diag);
  EXPECT_EQ(diag.count(), 1u);
  EXPECT_EQ(report.scores.back().params.at("top_k"), "3");
}

TEST(Baseline, MetricSelection) {
  auto params = fruit_params();
  params.metrics = {BaselineMetric::kTD};
  const auto report = evaluate_baselines(fruit_model(), fixture_docs(), fixture_vocab(), params);
  ASSERT_EQ(report.scores.size(), 1u);
  EXPECT_EQ(report.scores[0].metric, BaselineMetric::kTD);
}

TEST(Baseline, CsvRoundTrip) {
  auto report = evaluate_baselines(fruit_model(), fixture_docs(), fixture_vocab(), fruit_params());
  report.scores.push_back({BaselineMetric::kNPMI, 7, std::nullopt, {}});
  const auto parsed = parse_baseline_csv(baseline_csv_header() + baseline_csv_rows(report));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].model_name, "lda");
  EXPECT_EQ(parsed[0].num_topics, 2);
  ASSERT_EQ(parsed[0].scores.size(), report.scores.size());
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    EXPECT_EQ(parsed[0].scores[i].metric, report.scores[i].metric);
    EXPECT_EQ(parsed[0].scores[i].topic_id, report.scores[i].topic_id);
    EXPECT_EQ(parsed[0].scores[i].params, report.scores[i].params);
    ASSERT_EQ(parsed[0].scores[i].value.has_value(), report.scores[i].value.has_value());
    // The CSV carries 12 significant digits.
    if (report.scores[i].value) {
      EXPECT_EQ(format_double(*parsed[0].scores[i].value), format_double(*report.scores[i].value));
    }
  }
}

TEST(Baseline, CsvRejectsBadRows) {
  EXPECT_THROW(parse_baseline_csv("lda,fruit,2,model,,C_Foo,1,\n"), ValidationError);
  EXPECT_THROW(parse_baseline_csv("lda,fruit,2,model\n"), ValidationError);
}

TEST(Baseline, MetricNames) {
  for (auto m : kAllBaselineMetrics) EXPECT_EQ(parse_baseline_metric(to_string(m)), m);
  EXPECT_EQ(parse_baseline_metric("npmi"), BaselineMetric::kNPMI);
  EXPECT_EQ(parse_baseline_metric("IRBO"), BaselineMetric::kIRBO);
  EXPECT_FALSE(parse_baseline_metric("perplexity"));
  EXPECT_TRUE(is_lower_better(BaselineMetric::kTR));
  EXPECT_FALSE(is_lower_better(BaselineMetric::kTD));
}

TEST(ConfigSelection, ScoreIsArithmeticMean) {
  EXPECT_NEAR(config_score({-1.0, 0.1, 0.5, 0.9, 0.9}), 0.28, 1e-12);
}

TEST(ConfigSelection, RankingMatchesArgmaxOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ConfigCandidate> cands;
    for (int c = 0; c < 6; ++c) {
      ConfigCandidate cand{"cfg" + std::to_string(c), {}};
      for (auto m : kSelectionMetrics) cand.scores[m] = uniform_unit(rng) * 2.0 - 1.0;
      cands.push_back(cand);
    }
    const auto ranked = rank_configurations(cands);
    ASSERT_EQ(ranked.size(), cands.size());
    std::size_t best = 0;
    double best_score = -1e300;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      double sum = 0;
      for (auto m : kSelectionMetrics) sum += cands[c].scores.at(m);
      if (sum / 5.0 > best_score) {
        best_score = sum / 5.0;
        best = c;
      }
    }
    EXPECT_EQ(ranked.front().label, cands[best].label);
    EXPECT_NEAR(ranked.front().score, best_score, 1e-12);
    for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_GE(ranked[i - 1].score, ranked[i].score);
  }
}

TEST(ConfigSelection, TiesKeepInputOrder) {
  std::vector<ConfigCandidate> cands;
  for (const char* label : {"b", "a", "c"}) {
    ConfigCandidate c{label, {}};
    for (auto m : kSelectionMetrics) c.scores[m] = 0.5;
    cands.push_back(c);
  }
  const auto ranked = rank_configurations(cands);
  EXPECT_EQ(ranked[0].label, "b");
  EXPECT_EQ(ranked[1].label, "a");
  EXPECT_EQ(ranked[2].label, "c");
}

TEST(ConfigSelection, IncompleteCandidatesExcludedWithWarning) {
  ConfigCandidate full{"full", {}};
  for (auto m : kSelectionMetrics) full.scores[m] = 0.1;
  ConfigCandidate partial{"partial", {{BaselineMetric::kUMass, 5.0}}};
  Diagnostics diag;
  const auto ranked = rank_configurations({partial, full}, false, &diag);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].label, "full");
  ASSERT_EQ(diag.count(), 1u);
  EXPECT_NE(diag.warnings()[0].find("partial"), std::string::npos);
}

TEST(ConfigSelection, NormalizedVariantScalesPerMetric) {
  ConfigCandidate lo{"lo", {}}, hi{"hi", {}};
  for (auto m : kSelectionMetrics) {
    lo.scores[m] = 0.0;
    hi.scores[m] = 0.2;
  }
  // UMass has a much wider raw range; normalisation must neutralise it.
  lo.scores[BaselineMetric::kUMass] = 10.0;
  hi.scores[BaselineMetric::kUMass] = -10.0;
  EXPECT_EQ(rank_configurations({lo, hi}, false).front().label, "lo");
  const auto norm = rank_configurations({lo, hi}, true);
  EXPECT_EQ(norm.front().label, "hi");
  EXPECT_NEAR(norm.front().score, 4.0 / 5.0, 1e-12);
}
