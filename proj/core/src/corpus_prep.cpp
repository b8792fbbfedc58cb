#include "topiceval/corpus_prep.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <stdexcept>
#include <unordered_map>

#include "topiceval/parallel.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

using nlohmann::json;

PrepConfig prep_config_from_json(const json& j) {
  PrepConfig cfg;
  cfg.lowercase = j.value("lowercase", cfg.lowercase);
  cfg.strip_symbols = j.value("strip_symbols", cfg.strip_symbols);
  cfg.strip_quotes = j.value("strip_quotes", cfg.strip_quotes);
  cfg.stopword_files = j.value("stopword_files", cfg.stopword_files);
  cfg.vocab_cap = j.value("vocab_cap", cfg.vocab_cap);
  cfg.domain_stopword_doc_pct = j.value("domain_stopword_doc_pct", cfg.domain_stopword_doc_pct);
  cfg.domain_stopword_min_count = j.value("domain_stopword_min_count", cfg.domain_stopword_min_count);
  cfg.threads = j.value("threads", cfg.threads);
  if (cfg.vocab_cap == 0) throw ValidationError("vocab_cap", "must be > 0");
  if (cfg.domain_stopword_doc_pct <= 0.0 || cfg.domain_stopword_doc_pct > 100.0) {
    throw ValidationError("domain_stopword_doc_pct", "must lie in (0, 100]");
  }
  return cfg;
}

json to_json(const PrepConfig& cfg) {
  return json{{"lowercase", cfg.lowercase},
              {"strip_symbols", cfg.strip_symbols},
              {"strip_quotes", cfg.strip_quotes},
              {"stopword_files", cfg.stopword_files},
              {"vocab_cap", cfg.vocab_cap},
              {"domain_stopword_doc_pct", cfg.domain_stopword_doc_pct},
              {"domain_stopword_min_count", cfg.domain_stopword_min_count}};
}

std::string strip_quoted_replies(std::string_view text) {
  std::string out;
  for (const auto& line : split_lines(text)) {
    if (line == "-- " || line == "--") break;  // signature follows
    const auto t = trim(line);
    if (!t.empty() && (t.front() == '>' || t.front() == '|')) continue;
    if (t.ends_with("writes:") || t.ends_with("wrote:")) continue;
    out += line;
    out += '\n';
  }
  return out;
}

TokenList tokenize_normalize(std::string_view text, const PrepConfig& cfg) {
  std::string buf = cfg.strip_quotes ? strip_quoted_replies(text) : std::string(text);
  if (cfg.lowercase) buf = fold_case(buf);
  if (cfg.strip_symbols) {
    for (auto& c : buf) {
      const auto u = static_cast<unsigned char>(c);
      if (u < 0x80 && !std::isalnum(u)) c = ' ';
    }
  }
  return split_whitespace(buf);
}

StopwordSource load_stopwords(const std::string& path) {
  StopwordSource src;
  src.id = std::filesystem::path(path).filename().string();
  for (const auto& line : split_lines(read_file(path))) {
    const auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    src.words.insert(fold_case(w));
  }
  return src;
}

std::vector<std::string> VocabSpec::words() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.word);
  return out;
}

namespace {

struct TypeCounts {
  std::uint64_t count = 0;
  std::uint64_t docs = 0;
};

using CountTable = std::unordered_map<std::string, TypeCounts>;

CountTable count_types(const std::vector<TokenList>& docs, int threads) {
  const std::size_t n_chunks = std::max(1, threads);
  std::vector<CountTable> partial(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    auto& table = partial[c];
    for (std::size_t i = c; i < docs.size(); i += n_chunks) {
      std::vector<std::string_view> seen;
      for (const auto& tok : docs[i]) {
        auto& tc = table[tok];
        ++tc.count;
        seen.push_back(tok);
      }
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (auto w : seen) ++table[std::string(w)].docs;
    }
  });
  CountTable merged = std::move(partial[0]);
  for (std::size_t c = 1; c < n_chunks; ++c) {
    for (auto& [w, tc] : partial[c]) {
      auto& m = merged[w];
      m.count += tc.count;
      m.docs += tc.docs;
    }
  }
  return merged;
}

}  // namespace

VocabSpec build_vocab(const std::vector<TokenList>& docs, const std::vector<StopwordSource>& stopwords,
                      const VocabOptions& opts, Diagnostics* diag) {
  if (opts.cap == 0) throw std::invalid_argument("vocabulary cap must be > 0");
  const CountTable table = count_types(docs, opts.threads);
  const double doc_limit = opts.max_doc_pct / 100.0 * static_cast<double>(docs.size());

  std::vector<VocabEntry> candidates;
  candidates.reserve(table.size());
  for (const auto& [word, tc] : table) {
    const bool is_stop = std::any_of(stopwords.begin(), stopwords.end(),
                                     [&](const StopwordSource& s) { return s.words.contains(word); });
    if (is_stop) continue;
    if (static_cast<double>(tc.docs) > doc_limit) continue;
    if (tc.count < opts.min_count) continue;
    candidates.push_back({word, tc.count});
  }
  std::sort(candidates.begin(), candidates.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
  if (candidates.size() < opts.cap) {
    warn(diag, "vocabulary cap " + std::to_string(opts.cap) + " exceeds the " +
                   std::to_string(candidates.size()) + " available types; keeping all");
  } else {
    candidates.resize(opts.cap);
  }

  VocabSpec spec;
  spec.entries = std::move(candidates);
  for (const auto& s : stopwords) spec.stopwords_applied.push_back(s.id);
  if (opts.max_doc_pct < 100.0 || opts.min_count > 1) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "domain:doc_pct>%g,count<%llu", opts.max_doc_pct,
                  static_cast<unsigned long long>(opts.min_count));
    spec.stopwords_applied.emplace_back(buf);
  }
  return spec;
}

std::string serialize_vocab(const VocabSpec& vocab) {
  std::string out;
  for (const auto& s : vocab.stopwords_applied) out += "#stopwords\t" + s + "\n";
  for (const auto& e : vocab.entries) {
    out += e.word;
    out += '\t';
    out += std::to_string(e.count);
    out += '\n';
  }
  return out;
}

VocabSpec parse_vocab(std::string_view tsv) {
  VocabSpec spec;
  const auto lines = split_lines(tsv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& line = lines[n];
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (cols[0] == "#stopwords" && cols.size() == 2) {
      spec.stopwords_applied.push_back(cols[1]);
      continue;
    }
    VocabEntry e;
    e.word = cols[0];
    if (cols.size() >= 2) {
      try {
        e.count = std::stoull(cols[1]);
      } catch (const std::exception&) {
        throw ValidationError("vocab:" + std::to_string(n + 1), "bad count '" + cols[1] + "'");
      }
    }
    spec.entries.push_back(std::move(e));
  }
  return spec;
}

VocabSpec load_vocab(const std::string& path) { return parse_vocab(read_file(path)); }

std::vector<TokenList> filter_to_vocab(const std::vector<TokenList>& docs,
                                       const std::vector<std::string>& vocab) {
  const std::unordered_set<std::string> keep(vocab.begin(), vocab.end());
  std::vector<TokenList> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    TokenList kept;
    for (const auto& t : d) {
      if (keep.contains(t)) kept.push_back(t);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus, const std::vector<TokenList>& docs,
                         const VocabSpec* vocab) {
  if (corpus.empty() || docs.empty()) throw std::invalid_argument("corpus_stats: empty corpus");
  if (corpus.size() != docs.size()) {
    throw std::invalid_argument("corpus_stats: token lists do not match the corpus");
  }
  CorpusStats s;
  std::vector<std::uint64_t> lengths;
  lengths.reserve(docs.size());
  std::unordered_set<std::string_view> types;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    (corpus[i].split == Split::kTrain ? s.n_docs_train : s.n_docs_test) += 1;
    lengths.push_back(docs[i].size());
    s.token_total += docs[i].size();
    for (const auto& t : docs[i]) types.insert(t);
  }
  std::sort(lengths.begin(), lengths.end());
  const std::size_t n = lengths.size();
  s.token_avg = static_cast<double>(s.token_total) / static_cast<double>(n);
  s.token_median = (n % 2 == 1) ? static_cast<double>(lengths[n / 2])
                                : (static_cast<double>(lengths[n / 2 - 1]) + lengths[n / 2]) / 2.0;
  s.token_max = lengths.back();
  s.vocab_size_raw = types.size();
  s.vocab_size_filtered = vocab ? vocab->size() : types.size();
  return s;
}

json to_json(const CorpusStats& s) {
  return json{{"n_docs_train", s.n_docs_train},
              {"n_docs_test", s.n_docs_test},
              {"token_total", s.token_total},
              {"token_avg", s.token_avg},
              {"token_median", s.token_median},
              {"token_max", s.token_max},
              {"vocab_size_raw", s.vocab_size_raw},
              {"vocab_size_filtered", s.vocab_size_filtered}};
}

}  // namespace topiceval
