#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiceval/diagnostics.hpp"
#include "topiceval/interchange.hpp"

namespace topiceval {

struct PrepConfig {
  bool lowercase = true;
  bool strip_symbols = true;
  bool strip_quotes = true;
  std::vector<std::string> stopword_files;
  std::size_t vocab_cap = 10000;
  // Types present in more than this percentage of documents are dropped.
  double domain_stopword_doc_pct = 70.0;
  // Types with fewer total occurrences than this are dropped.
  std::uint64_t domain_stopword_min_count = 2;
  int threads = 1;
};

PrepConfig prep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PrepConfig& cfg);

using TokenList = std::vector<std::string>;

// Never fails; an empty result means the caller should drop the document.
TokenList tokenize_normalize(std::string_view text, const PrepConfig& cfg);

// Removes quoted-reply lines ("> ..."), reply attributions ("... writes:")
// and everything below a "-- " signature delimiter.
std::string strip_quoted_replies(std::string_view text);

struct StopwordSource {
  std::string id;
  std::unordered_set<std::string> words;
};

StopwordSource load_stopwords(const std::string& path);

struct VocabOptions {
  std::size_t cap = 10000;
  double max_doc_pct = 70.0;
  std::uint64_t min_count = 2;
  int threads = 1;
};

struct VocabEntry {
  std::string word;
  std::uint64_t count = 0;
  bool operator==(const VocabEntry&) const = default;
};

struct VocabSpec {
  std::vector<VocabEntry> entries;  // descending frequency, ties lexicographic
  std::vector<std::string> stopwords_applied;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<std::string> words() const;
  bool operator==(const VocabSpec&) const = default;
};

VocabSpec build_vocab(const std::vector<TokenList>& docs, const std::vector<StopwordSource>& stopwords,
                      const VocabOptions& opts, Diagnostics* diag = nullptr);

// "word\tcount" per line.
std::string serialize_vocab(const VocabSpec& vocab);
VocabSpec parse_vocab(std::string_view tsv);
VocabSpec load_vocab(const std::string& path);

std::vector<TokenList> filter_to_vocab(const std::vector<TokenList>& docs,
                                       const std::vector<std::string>& vocab);

struct CorpusStats {
  std::size_t n_docs_train = 0;
  std::size_t n_docs_test = 0;
  std::uint64_t token_total = 0;
  double token_avg = 0.0;
  double token_median = 0.0;
  std::uint64_t token_max = 0;
  std::size_t vocab_size_raw = 0;
  std::size_t vocab_size_filtered = 0;
};

// `docs[i]` are the tokens of `corpus[i]`. Throws std::invalid_argument on an
// empty corpus.
CorpusStats corpus_stats(const Corpus& corpus, const std::vector<TokenList>& docs,
                         const VocabSpec* vocab = nullptr);
nlohmann::json to_json(const CorpusStats& stats);

}  // namespace topiceval
