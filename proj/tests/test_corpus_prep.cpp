#include <gtest/gtest.h>

#include "topiceval/corpus_prep.hpp"

using namespace topiceval;

namespace {

std::vector<TokenList> docs_from_counts(const std::vector<std::pair<std::string, int>>& counts) {
  // One document per occurrence so document frequency tracks the count.
  std::vector<TokenList> docs;
  for (const auto& [w, n] : counts) {
    for (int i = 0; i < n; ++i) docs.push_back({w});
  }
  return docs;
}

VocabOptions loose(std::size_t cap) {
  VocabOptions o;
  o.cap = cap;
  o.max_doc_pct = 100.0;
  o.min_count = 1;
  return o;
}

}  // namespace

TEST(Tokenize, LowercasesAndStripsSymbols) {
  const PrepConfig cfg;
  EXPECT_EQ(tokenize_normalize("Hello, World!", cfg), (TokenList{"hello", "world"}));
  EXPECT_TRUE(tokenize_normalize("", cfg).empty());
  EXPECT_TRUE(tokenize_normalize("  ... !!! ", cfg).empty());
}

TEST(Tokenize, PassesCanBeDisabled) {
  PrepConfig cfg;
  cfg.lowercase = false;
  cfg.strip_symbols = false;
  EXPECT_EQ(tokenize_normalize("Hello, World!", cfg), (TokenList{"Hello,", "World!"}));
}

// Five hand-labelled emails; none of the quoted or signature material may
// leak into the tokens.
TEST(Tokenize, QuotedRepliesAndSignaturesAreRemoved) {
  const PrepConfig cfg;
  const std::vector<std::pair<std::string, TokenList>> emails = {
      {"Thanks for the note.\n> original question here\nSee you", {"thanks", "for", "the", "note", "see", "you"}},
      {"John Smith writes:\n> quoted line\n> another\nMy answer", {"my", "answer"}},
      {"In article <1@x>, jane wrote:\n| old text\nReply body\n-- \nJane\nSignature line", {"reply", "body"}},
      {"No quotes at all", {"no", "quotes", "at", "all"}},
      {">> nested\n> level\n  > indented quote\nkept words", {"kept", "words"}},
  };
  for (const auto& [text, expected] : emails) EXPECT_EQ(tokenize_normalize(text, cfg), expected) << text;
}

TEST(Vocab, TakesMostFrequentUpToCap) {
  const auto docs = docs_from_counts({{"a", 5}, {"b", 3}, {"c", 1}});
  EXPECT_EQ(build_vocab(docs, {}, loose(2)).words(), (std::vector<std::string>{"a", "b"}));
}

TEST(Vocab, TiesBreakLexicographically) {
  const auto docs = docs_from_counts({{"b", 5}, {"a", 5}});
  EXPECT_EQ(build_vocab(docs, {}, loose(1)).words(), (std::vector<std::string>{"a"}));
}

TEST(Vocab, OversizedCapWarnsAndKeepsAll) {
  Diagnostics diag;
  const auto v = build_vocab(docs_from_counts({{"a", 2}, {"b", 1}}), {}, loose(10), &diag);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(diag.count(), 1u);
}

TEST(Vocab, StopwordsAndDomainThresholds) {
  StopwordSource stop{"en", {"the"}};
  const std::vector<TokenList> docs = {{"the", "cat", "every"}, {"the", "dog", "every", "cat"}, {"every", "rare"}};
  VocabOptions o;
  o.cap = 100;
  o.max_doc_pct = 70.0;  // "every" is in all three documents
  o.min_count = 2;       // "rare" and "dog" occur once
  const auto v = build_vocab(docs, {stop}, o);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"cat"}));
  ASSERT_EQ(v.stopwords_applied.size(), 2u);
  EXPECT_EQ(v.stopwords_applied[0], "en");
}

TEST(Vocab, InvariantsHoldOnGeneratedCorpora) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<TokenList> docs;
    std::uint64_t x = seed;
    for (int d = 0; d < 30; ++d) {
      TokenList doc;
      for (int t = 0; t < 25; ++t) {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        doc.push_back("w" + std::to_string((x >> 33) % 40));
      }
      docs.push_back(doc);
    }
    const StopwordSource stop{"s", {"w1", "w2"}};
    VocabOptions small = loose(10);
    VocabOptions big = loose(20);
    const auto v10 = build_vocab(docs, {stop}, small);
    const auto v20 = build_vocab(docs, {stop}, big);
    ASSERT_LE(v10.size(), 10u);
    for (std::size_t i = 1; i < v10.entries.size(); ++i) EXPECT_GE(v10.entries[i - 1].count, v10.entries[i].count);
    for (const auto& w : v10.words()) {
      EXPECT_NE(w, "w1");
      EXPECT_NE(w, "w2");
    }
    // Monotone in the cap: the smaller vocabulary is a prefix of the larger.
    const auto w10 = v10.words();
    const auto w20 = v20.words();
    EXPECT_TRUE(std::equal(w10.begin(), w10.end(), w20.begin()));
    // Thread count never changes the result.
    small.threads = 4;
    EXPECT_EQ(build_vocab(docs, {stop}, small), v10);
  }
}

TEST(Vocab, SerializationRoundTrips) {
  StopwordSource stop{"list.txt", {"x"}};
  VocabOptions o = loose(5);
  o.min_count = 2;
  const auto v = build_vocab({{"a", "a", "b", "b", "b", "c"}}, {stop}, o);
  EXPECT_EQ(parse_vocab(serialize_vocab(v)), v);
}

TEST(Stats, MatchesHandCounts) {
  Corpus corpus(3);
  corpus[0].split = Split::kTrain;
  corpus[1].split = Split::kTrain;
  corpus[2].split = Split::kTest;
  const std::vector<TokenList> docs = {{"a", "b"}, {"a", "b", "c", "d"}, {"a", "b", "c", "d", "e", "f"}};
  const auto s = corpus_stats(corpus, docs);
  EXPECT_EQ(s.n_docs_train, 2u);
  EXPECT_EQ(s.n_docs_test, 1u);
  EXPECT_EQ(s.token_total, 12u);
  EXPECT_DOUBLE_EQ(s.token_avg, 4.0);
  EXPECT_DOUBLE_EQ(s.token_median, 4.0);
  EXPECT_EQ(s.token_max, 6u);
  EXPECT_EQ(s.vocab_size_raw, 6u);

  const auto one = corpus_stats(Corpus(1), {{"a", "b", "c", "d", "e", "f", "g"}});
  EXPECT_DOUBLE_EQ(one.token_avg, 7.0);
  EXPECT_DOUBLE_EQ(one.token_median, 7.0);
  EXPECT_EQ(one.token_max, 7u);

  // Even count: median is the mean of the middle pair.
  EXPECT_DOUBLE_EQ(corpus_stats(Corpus(2), {{"a"}, {"a", "b", "c", "d"}}).token_median, 2.5);
  EXPECT_THROW(corpus_stats({}, {}), std::invalid_argument);
}

TEST(Stats, FiveDocFixture) {
  // Hand count: lengths 3, 1, 4, 1, 5 -> total 14, avg 2.8, median 3, max 5,
  // types {x,y,z,w,v} = 5.
  const std::vector<TokenList> docs = {{"x", "y", "z"}, {"x"}, {"w", "x", "y", "y"}, {"v"}, {"z", "z", "z", "z", "z"}};
  const auto s = corpus_stats(Corpus(5), docs);
  EXPECT_EQ(s.token_total, 14u);
  EXPECT_DOUBLE_EQ(s.token_avg, 2.8);
  EXPECT_DOUBLE_EQ(s.token_median, 3.0);
  EXPECT_EQ(s.token_max, 5u);
  EXPECT_EQ(s.vocab_size_raw, 5u);
}
