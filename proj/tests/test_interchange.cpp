#include <gtest/gtest.h>

#include <filesystem>

#include "topiceval/interchange.hpp"
#include "topiceval/judgment.hpp"
#include "topiceval/text.hpp"

using namespace topiceval;
using nlohmann::json;

namespace {

json ten_words(int offset) {
  json words = json::array();
  for (int i = 0; i < 10; ++i) words.push_back("w" + std::to_string(offset + i));
  return words;
}

json two_topics() {
  return {{"model", "lda"},
          {"dataset", "toy"},
          {"num_topics", 2},
          {"topics", {{{"id", 0}, {"words", ten_words(0)}}, {{"id", 1}, {"words", ten_words(10)}}}}};
}

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

Corpus small_corpus() {
  return parse_corpus(
      "{\"doc_id\":\"a\",\"text\":\"one\",\"split\":\"train\"}\n"
      "{\"doc_id\":\"b\",\"text\":\"two\",\"split\":\"test\",\"labels\":[\"x\"]}\n");
}

}  // namespace

TEST(ValidateTopics, AcceptsMinimalValidFile) {
  const auto m = validate_topics(two_topics().dump());
  EXPECT_EQ(m.num_topics, 2);
  EXPECT_EQ(m.topics.size(), 2u);
  EXPECT_EQ(m.topics[1].words.front(), "w10");
  EXPECT_EQ(m.config_label(), "lda/toy/K2");
}

TEST(ValidateTopics, CaseFoldCollisionNamesTopic) {
  auto j = two_topics();
  j["topics"][1]["words"][3] = "W10";
  try {
    validate_topics(j.dump());
    FAIL() << "expected a duplicate-word error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "$.topics[1].words");
    EXPECT_NE(std::string(e.what()).find("topic 1"), std::string::npos);
  }
}

TEST(ValidateTopics, CardinalityMismatch) {
  auto j = two_topics();
  j["num_topics"] = 3;
  EXPECT_EQ(field_of([&] { validate_topics(j.dump()); }), "$.num_topics");
}

TEST(ValidateTopics, RejectsIncreasingWeights) {
  auto j = two_topics();
  j["topics"][0]["weights"] = {0.5, 0.6, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  EXPECT_EQ(field_of([&] { validate_topics(j.dump()); }), "$.topics[0].weights");
}

TEST(ValidateTopics, NamesMissingAndMistypedFields) {
  auto j = two_topics();
  j.erase("dataset");
  EXPECT_EQ(field_of([&] { validate_topics(j.dump()); }), "$.dataset");
  j = two_topics();
  j["topics"][0]["id"] = "zero";
  EXPECT_EQ(field_of([&] { validate_topics(j.dump()); }), "$.topics[0].id");
  j = two_topics();
  j["topics"][1]["id"] = 0;
  EXPECT_EQ(field_of([&] { validate_topics(j.dump()); }), "$.topics[1].id");
  EXPECT_EQ(field_of([&] { validate_topics("{not json"); }), "topics.json");
}

TEST(ValidateTopics, RoundTripIsStructurallyEqual) {
  auto j = two_topics();
  j["topics"][0]["weights"] = {0.3, 0.2, 0.1, 0.1, 0.1, 0.05, 0.05, 0.04, 0.03, 0.03};
  const auto m = validate_topics(j.dump());
  EXPECT_EQ(validate_topics(serialize_topics(m)), m);
}

TEST(ValidateAssignments, AcceptsNormalizedRow) {
  const auto model = validate_topics(two_topics().dump());
  const auto a = validate_assignments(
      R"({"doc_id":"a","topics":[{"id":0,"weight":0.7},{"id":1,"weight":0.3}]})", model, small_corpus());
  ASSERT_EQ(a.size(), 2u);
  EXPECT_DOUBLE_EQ(*a[0].weight, 0.7);
}

TEST(ValidateAssignments, RejectsUnnormalizedRow) {
  const auto model = validate_topics(two_topics().dump());
  EXPECT_EQ(field_of([&] {
              validate_assignments(R"({"doc_id":"a","topics":[{"id":0,"weight":0.7},{"id":1,"weight":0.7}]})",
                                   model, small_corpus());
            }),
            "assignments.jsonl:1.topics");
}

TEST(ValidateAssignments, RejectsDanglingReferences) {
  auto j = two_topics();
  j["num_topics"] = 3;
  j["topics"].push_back({{"id", 2}, {"words", ten_words(20)}});
  const auto model = validate_topics(j.dump());
  EXPECT_EQ(field_of([&] {
              validate_assignments(R"({"doc_id":"a","topics":[{"id":5,"weight":"HARD"}]})", model, small_corpus());
            }),
            "assignments.jsonl:1.topics[0].id");
  EXPECT_EQ(field_of([&] {
              validate_assignments(R"({"doc_id":"zz","topics":[{"id":1,"weight":"HARD"}]})", model, small_corpus());
            }),
            "assignments.jsonl:1.doc_id");
}

TEST(ValidateAssignments, HardMustBeAlone) {
  const auto model = validate_topics(two_topics().dump());
  EXPECT_THROW(validate_assignments(R"({"doc_id":"a","topics":[{"id":0,"weight":"HARD"},{"id":1,"weight":1.0}]})",
                                    model, small_corpus()),
               ValidationError);
}

TEST(ValidateAssignments, RoundTrip) {
  const auto model = validate_topics(two_topics().dump());
  const auto corpus = small_corpus();
  const auto a = validate_assignments(
      "{\"doc_id\":\"a\",\"topics\":[{\"id\":0,\"weight\":0.25},{\"id\":1,\"weight\":0.75}]}\n"
      "{\"doc_id\":\"b\",\"topics\":[{\"id\":1,\"weight\":\"HARD\"}]}\n",
      model, corpus);
  EXPECT_EQ(validate_assignments(serialize_assignments(a), model, corpus), a);
}

TEST(Corpus, RoundTripAndDuplicates) {
  const auto c = small_corpus();
  EXPECT_EQ(parse_corpus(serialize_corpus(c)), c);
  EXPECT_EQ(c[1].split, Split::kTest);
  EXPECT_THROW(parse_corpus("{\"doc_id\":\"a\",\"text\":\"x\",\"split\":\"train\"}\n"
                            "{\"doc_id\":\"a\",\"text\":\"y\",\"split\":\"train\"}\n"),
               ValidationError);
  EXPECT_THROW(parse_corpus("{\"doc_id\":\"a\",\"text\":\"\",\"split\":\"train\"}\n"), ValidationError);
  EXPECT_THROW(parse_corpus("{\"doc_id\":\"a\",\"text\":\"x\",\"split\":\"dev\"}\n"), ValidationError);
}

TEST(ExportBundle, ValidBundlePasses) {
  const auto dir = std::filesystem::temp_directory_path() / "topiceval_export_ok";
  std::filesystem::create_directories(dir);
  write_file((dir / "topics.json").string(), two_topics().dump());
  write_file((dir / "corpus.jsonl").string(), serialize_corpus(small_corpus()));
  write_file((dir / "assignments.jsonl").string(),
             "{\"doc_id\":\"a\",\"topics\":[{\"id\":0,\"weight\":\"HARD\"}]}\n");
  write_file((dir / "export.json").string(),
             R"({"toolkit":"bertopic","toolkit_version":"0.16","k":2,"m":10})");
  const auto b = validate_export_bundle(dir.string());
  EXPECT_EQ(b.meta.toolkit, "bertopic");
  EXPECT_EQ(parse_export_metadata(to_json(b.meta).dump()), b.meta);

  write_file((dir / "export.json").string(), R"({"toolkit":"bertopic","toolkit_version":"0.16","k":2,"m":3})");
  EXPECT_EQ(field_of([&] { validate_export_bundle(dir.string()); }), "$.topics[0].words");
  write_file((dir / "export.json").string(), R"({"toolkit":"bertopic","toolkit_version":"0.16","k":4,"m":10})");
  EXPECT_EQ(field_of([&] { validate_export_bundle(dir.string()); }), "$.num_topics");
  write_file((dir / "export.json").string(), R"({"toolkit":"bertopic","toolkit_version":"0.16","k":2,"m":10})");
  std::filesystem::remove(dir / "assignments.jsonl");
  EXPECT_EQ(field_of([&] { validate_export_bundle(dir.string()); }), "assignments.jsonl");
  std::filesystem::remove_all(dir);
}

TEST(JudgmentStore, RejectsDuplicateKeyAndRoundTrips) {
  JudgmentStore store;
  JudgmentRecord r;
  r.metric_id = MetricId::kCOutlier;
  r.target = DocTarget{"doc-1", 3};
  r.llm_id = "judge";
  r.sample_index = 2;
  r.prompt_hash = 0xabcdef;
  r.raw_text = "apple, pear";
  r.parsed = WordList{{"apple", "pear"}};
  store.append(r);
  EXPECT_THROW(store.append(r), std::exception);
  EXPECT_FALSE(store.append_if_new(r));
  auto r2 = r;
  r2.sample_index = 3;
  r2.parsed.reset();
  EXPECT_TRUE(store.append_if_new(r2));
  const auto back = JudgmentStore::parse(store.serialize());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], r);
  EXPECT_EQ(back[1], r2);
  EXPECT_FALSE(back[1].valid());
}

TEST(JudgmentRecord, EveryPayloadKindRoundTrips) {
  const std::vector<std::pair<MetricId, Payload>> cases = {
      {MetricId::kLRate, Rating{2}},
      {MetricId::kLNonword, WordList{{"xqz"}}},
      {MetricId::kRDuplicate, PairList{{{"car", "automobile"}}}},
      {MetricId::kAMissingTheme, ThemeList{{"Space travel", "budget"}}},
      {MetricId::kAIrtw, WordList{{}}},
  };
  for (const auto& [metric, payload] : cases) {
    JudgmentRecord r;
    r.metric_id = metric;
    r.target = PairTarget{1, 4};
    r.llm_id = "x";
    r.parsed = payload;
    EXPECT_EQ(judgment_from_json(to_json(r)), r);
  }
  EXPECT_EQ(target_label(PairTarget{1, 4}), "pair:1-4");
  EXPECT_EQ(target_label(DocTarget{"d7", 2}), "doc:d7@2");
}
