#include <gtest/gtest.h>

#include <bitset>
#include <set>

#include "topiceval/llm_metrics.hpp"
#include "topiceval/random.hpp"
#include "topiceval/text.hpp"

using namespace topiceval;

namespace {

JudgmentRecord record(MetricId m, int index, std::optional<Payload> payload) {
  JudgmentRecord r;
  r.metric_id = m;
  r.target = TopicTarget{0};
  r.llm_id = "j";
  r.sample_index = index;
  r.prompt_hash = 42;
  r.parsed = std::move(payload);
  return r;
}

std::string toy(const std::string& name) { return std::string(TOPICEVAL_TOY_DATA) + "/" + name; }

LlmConfig scripted_config(int max_in_flight = 1) {
  LlmConfig cfg;
  cfg.llm_id = "scripted";
  cfg.endpoint_url = "mock://scripted?seed=7";
  cfg.model_identifier = "scripted";
  cfg.max_in_flight = max_in_flight;
  return cfg;
}

}  // namespace

// Every presence pattern of one word across five samples.
TEST(Voting, ThreeOfFiveExhaustive) {
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::vector<JudgmentRecord> recs;
    for (int s = 0; s < 5; ++s) {
      WordList w;
      if (mask & (1u << s)) w.items.push_back("moon");
      w.items.push_back(s == 0 ? "always" : "x" + std::to_string(s));
      recs.push_back(record(MetricId::kCOutlier, s, Payload{w}));
    }
    const auto j = aggregate_records(MetricId::kCOutlier, TopicTarget{0}, "j", recs, 5);
    const bool flagged = std::find(j.flagged.begin(), j.flagged.end(), "moon") != j.flagged.end();
    EXPECT_EQ(flagged, std::bitset<5>(mask).count() >= 3) << "mask " << mask;
    // One-vote items never pass.
    EXPECT_EQ(std::count(j.flagged.begin(), j.flagged.end(), "always"), 0);
    EXPECT_DOUBLE_EQ(j.score->value, flagged ? 1.0 : 0.0);
  }
}

TEST(Voting, PairVotesAreUnordered) {
  std::vector<JudgmentRecord> recs;
  for (int s = 0; s < 5; ++s) {
    PairList p;
    if (s < 3) p.items.push_back({"auto", "car"});
    recs.push_back(record(MetricId::kRDuplicate, s, Payload{p}));
  }
  const auto j = aggregate_records(MetricId::kRDuplicate, TopicTarget{0}, "j", recs, 5);
  ASSERT_EQ(j.flagged_pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(j.score->value, 1.0);
  EXPECT_DOUBLE_EQ(*j.mean_count, 3.0 / 5.0);
}

TEST(Aggregation, RatingMean) {
  std::vector<JudgmentRecord> recs;
  const int values[] = {3, 3, 2, 2, 3};
  for (int s = 0; s < 5; ++s) recs.push_back(record(MetricId::kCRate, s, Payload{Rating{values[s]}}));
  const auto j = aggregate_records(MetricId::kCRate, TopicTarget{0}, "j", recs, 5);
  ASSERT_TRUE(j.score);
  EXPECT_DOUBLE_EQ(j.score->value, 2.6);
  EXPECT_EQ(j.score->aggregation, Aggregation::kMean);
  EXPECT_EQ(j.n_valid, 5);
}

TEST(Aggregation, UsesFirstNValidBySampleIndex) {
  std::vector<JudgmentRecord> recs;
  // Out of order on purpose; index 1 invalid, index 5 is its redraw, index 6 is surplus.
  recs.push_back(record(MetricId::kCRate, 6, Payload{Rating{1}}));
  recs.push_back(record(MetricId::kCRate, 0, Payload{Rating{3}}));
  recs.push_back(record(MetricId::kCRate, 1, std::nullopt));
  for (int s = 2; s < 6; ++s) recs.push_back(record(MetricId::kCRate, s, Payload{Rating{2}}));
  const auto j = aggregate_records(MetricId::kCRate, TopicTarget{0}, "j", recs, 5);
  EXPECT_DOUBLE_EQ(j.score->value, (3.0 + 2 * 4) / 5.0);
  EXPECT_EQ(j.records.size(), 7u);
  EXPECT_EQ(j.records.front().sample_index, 0);
}

TEST(Aggregation, FailedWhenMajorityInvalid) {
  std::vector<JudgmentRecord> recs;
  for (int s = 0; s < 5; ++s) {
    recs.push_back(record(MetricId::kCRate, s, s < 2 ? std::optional<Payload>(Rating{2}) : std::nullopt));
  }
  const auto j = aggregate_records(MetricId::kCRate, TopicTarget{0}, "j", recs, 5);
  EXPECT_TRUE(j.failed);
  EXPECT_FALSE(j.score);
}

TEST(Aggregation, ThemeCountsAverage) {
  std::vector<JudgmentRecord> recs;
  const std::vector<std::vector<std::string>> themes = {{"a"}, {"a", "b"}, {}, {"c"}, {"a", "b", "c"}};
  for (int s = 0; s < 5; ++s) recs.push_back(record(MetricId::kAMissingTheme, s, Payload{ThemeList{themes[s]}}));
  const auto j = aggregate_records(MetricId::kAMissingTheme, TopicTarget{0}, "j", recs, 5);
  EXPECT_DOUBLE_EQ(j.score->value, 7.0 / 5.0);
  EXPECT_EQ(j.score->aggregation, Aggregation::kMeanCount);
}

TEST(ModelLevel, MeanExcludesFailuresAndAddsMeanCountForIrtw) {
  auto make = [](MetricId m, std::optional<double> v, std::optional<double> mean_count = std::nullopt) {
    TargetJudgment j;
    j.metric_id = m;
    j.failed = !v;
    if (v) {
      MetricScore s;
      s.metric_id = m;
      s.value = *v;
      s.aggregation = metric_kind(m) == MetricKind::kRating ? Aggregation::kMean : Aggregation::kMajorityCount;
      j.score = s;
    }
    j.mean_count = mean_count;
    return j;
  };
  const auto scores = aggregate_model_level({make(MetricId::kCRate, 3.0), make(MetricId::kCRate, 2.0),
                                             make(MetricId::kCRate, std::nullopt), make(MetricId::kAIrtw, 2.0, 2.4),
                                             make(MetricId::kAIrtw, 0.0, 0.6)});
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_EQ(scores[0].metric_id, MetricId::kCRate);
  EXPECT_DOUBLE_EQ(*scores[0].value, 2.5);
  EXPECT_EQ(scores[0].n_targets, 3u);
  EXPECT_EQ(scores[0].n_failed, 1u);
  EXPECT_EQ(scores[1].aggregation, Aggregation::kMajorityCount);
  EXPECT_DOUBLE_EQ(*scores[1].value, 1.0);
  EXPECT_EQ(scores[2].aggregation, Aggregation::kMeanCount);
  EXPECT_DOUBLE_EQ(*scores[2].value, 1.5);
}

TEST(TopicPairs, AllPairsSorted) {
  TopicModelOutput m;
  for (int id : {3, 0, 2, 1}) m.topics.push_back({id, {"w"}, std::nullopt});
  const auto pairs = select_topic_pairs(m, PairStrategy::parse("all"), 1);
  ASSERT_EQ(pairs.size(), 6u);
  EXPECT_EQ(pairs.front(), std::make_pair(0, 1));
  EXPECT_EQ(pairs.back(), std::make_pair(2, 3));
  for (const auto& [a, b] : pairs) EXPECT_LT(a, b);
}

TEST(TopicPairs, SampledSubsetIsDeterministicAndClamped) {
  TopicModelOutput m;
  for (int id = 0; id < 10; ++id) m.topics.push_back({id, {"w"}, std::nullopt});
  const auto s = PairStrategy::parse("sample:7");
  EXPECT_EQ(s.describe(), "sample:7");
  const auto a = select_topic_pairs(m, s, 11);
  EXPECT_EQ(a, select_topic_pairs(m, s, 11));
  EXPECT_EQ(a.size(), 7u);
  EXPECT_EQ(std::set(a.begin(), a.end()).size(), 7u);
  Diagnostics diag;
  EXPECT_EQ(select_topic_pairs(m, PairStrategy::parse("sample:100"), 11, &diag).size(), 45u);
  EXPECT_EQ(diag.count(), 1u);
  EXPECT_THROW(PairStrategy::parse("some"), std::exception);
}

TEST(DocTopicSampling, PrimaryTopics) {
  const std::vector<DocTopicAssignment> a = {{"d1", 0, 0.3}, {"d1", 1, 0.7}, {"d2", 2, 0.5}, {"d2", 1, 0.5},
                                             {"d3", 4, std::nullopt}};
  const auto p = primary_topics(a);
  EXPECT_EQ(p.at("d1"), 1);
  EXPECT_EQ(p.at("d2"), 1);  // lowest id on ties
  EXPECT_EQ(p.at("d3"), 4);
}

TEST(DocTopicSampling, BoundedDeterministicAndConsistent) {
  const auto corpus = load_corpus(toy("corpus.jsonl"));
  const auto model = load_topics(toy("topics_lda.json"));
  const auto assignments = load_assignments(toy("assignments_lda.jsonl"), model, corpus);
  const auto primary = primary_topics(assignments);
  for (std::size_t per_topic : {1u, 2u, 3u, 100u}) {
    const auto a = sample_doc_topic_pairs(model, corpus, assignments, per_topic, 42);
    const auto b = sample_doc_topic_pairs(model, corpus, assignments, per_topic, 42);
    ASSERT_EQ(a.size(), b.size());
    std::map<int, std::size_t> per;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].doc_id, b[i].doc_id);
      EXPECT_EQ(primary.at(a[i].doc_id), a[i].topic_id);
      ++per[a[i].topic_id];
    }
    for (const auto& [topic, n] : per) EXPECT_LE(n, per_topic);
  }
  // Large per_topic takes every document exactly once.
  EXPECT_EQ(sample_doc_topic_pairs(model, corpus, assignments, 100, 1).size(), primary.size());
}

TEST(DocTopicSampling, UniformInclusion) {
  TopicModelOutput model;
  model.topics = {{0, {"w"}, std::nullopt}};
  Corpus corpus;
  std::vector<DocTopicAssignment> assignments;
  for (int d = 0; d < 8; ++d) {
    corpus.push_back({"d" + std::to_string(d), "text", Split::kTrain, std::nullopt});
    assignments.push_back({"d" + std::to_string(d), 0, std::nullopt});
  }
  std::map<std::string, int> hits;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    for (const auto& p : sample_doc_topic_pairs(model, corpus, assignments, 2, static_cast<std::uint64_t>(t))) {
      ++hits[p.doc_id];
    }
  }
  // Each document is included with probability 2/8; 4 sigma band.
  const double expected = trials * 0.25;
  const double sigma = std::sqrt(trials * 0.25 * 0.75);
  for (const auto& [doc, n] : hits) EXPECT_NEAR(n, expected, 4 * sigma) << doc;
}

TEST(EvaluateModel, ToyRunDeterministicAcrossThreads) {
  const auto corpus = load_corpus(toy("corpus.jsonl"));
  const auto model = load_topics(toy("topics_lda.json"));
  const auto assignments = load_assignments(toy("assignments_lda.jsonl"), model, corpus);
  const PromptLibrary prompts;
  JudgeOptions opts;
  opts.per_topic_docs = 2;
  opts.seed = 42;

  auto run_with = [&](int threads) {
    const auto cfg = scripted_config(threads);
    Gateway gw(cfg, make_backend(cfg));
    opts.threads = threads;
    return evaluate_model(model, &corpus, &assignments, gw, prompts, opts);
  };
  const auto one = run_with(1);
  const auto four = run_with(4);
  EXPECT_EQ(scores_csv_rows(one), scores_csv_rows(four));
  EXPECT_EQ(flagged_jsonl(one), flagged_jsonl(four));

  std::set<MetricId> seen;
  for (const auto& j : one.judgments) seen.insert(j.metric_id);
  EXPECT_EQ(seen.size(), kJudgeMetrics.size());
  // 5 topics: 6 per-topic metrics x 5, 10 pairs, 2 alignment metrics x doc pairs.
  EXPECT_EQ(one.judgments.size(), 6u * 5 + 10 + 2 * one.doc_pairs.size());
}

TEST(EvaluateModel, ScoresCsvRoundTrip) {
  const auto model = load_topics(toy("topics_lda.json"));
  const PromptLibrary prompts;
  JudgeOptions opts;
  opts.metrics = {MetricId::kCRate, MetricId::kCOutlier, MetricId::kDRate};
  const auto cfg = scripted_config();
  Gateway gw(cfg, make_backend(cfg));
  const auto run = evaluate_model(model, nullptr, nullptr, gw, prompts, opts);
  const auto rows = parse_scores_csv(scores_csv_header() + scores_csv_rows(run));
  ASSERT_EQ(rows.size(), run.judgments.size() + run.model_level.size());
  for (std::size_t i = 0; i < run.judgments.size(); ++i) {
    const auto& j = run.judgments[i];
    EXPECT_EQ(rows[i].metric, to_string(j.metric_id));
    EXPECT_EQ(rows[i].target, target_label(j.target));
    EXPECT_EQ(rows[i].n_valid_samples, j.n_valid);
    ASSERT_EQ(rows[i].value.has_value(), j.score.has_value());
    if (j.score) EXPECT_EQ(format_double(*rows[i].value), format_double(j.score->value));
  }
  std::size_t model_rows = 0;
  for (const auto& r : rows) {
    EXPECT_EQ(r.model, model.model_name);
    EXPECT_EQ(r.k, model.num_topics);
    if (r.scope == "model-level") ++model_rows;
  }
  EXPECT_EQ(model_rows, run.model_level.size());
}
