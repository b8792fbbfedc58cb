#include <algorithm>
#include <set>

#include "topiceval/gateway.hpp"
#include "topiceval/lexicon.hpp"
#include "topiceval/random.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace {

bool is_vowel(char c) { return std::string_view("aeiouy").find(c) != std::string_view::npos; }

bool looks_nonword(std::string_view w) {
  int vowels = 0;
  int run = 0;
  int max_run = 0;
  for (unsigned char c : w) {
    if (c >= 0x80) return false;  // leave non-ASCII words alone
    if (!std::isalpha(c) && c != '-' && c != '\'') return true;
    if (is_vowel(static_cast<char>(std::tolower(c)))) {
      ++vowels;
      run = 0;
    } else {
      max_run = std::max(max_run, ++run);
    }
  }
  return (vowels == 0 && w.size() >= 3) || max_run >= 5;
}

bool looks_duplicate(const std::string& a, const std::string& b, const SynonymLexicon& lex) {
  if (lex.same_concept(a, b)) return true;
  const auto n = std::min(a.size(), b.size());
  return n >= 4 && a.compare(0, 4, b, 0, 4) == 0 && (a.starts_with(b) || b.starts_with(a) || n >= 6);
}

double bigram_similarity(const std::string& a, const std::string& b) {
  auto grams = [](const std::string& s) {
    std::set<std::string> g;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) g.insert(s.substr(i, 2));
    return g;
  };
  const auto ga = grams(a);
  const auto gb = grams(b);
  if (ga.empty() || gb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& g : ga) inter += gb.count(g);
  return static_cast<double>(inter) / static_cast<double>(ga.size() + gb.size() - inter);
}

std::vector<std::string> words_of(const SlotValues& slots, Slot slot) {
  std::vector<std::string> out;
  auto it = slots.find(slot);
  if (it == slots.end()) return out;
  for (const auto& w : split(it->second, ',')) {
    auto t = trim_copy(w);
    if (!t.empty()) out.push_back(fold_case(t));
  }
  return out;
}

std::vector<std::string> doc_tokens(const std::string& text) {
  std::string cleaned;
  for (unsigned char c : fold_case(text)) cleaned += std::isalnum(c) || c >= 0x80 ? static_cast<char>(c) : ' ';
  return split_whitespace(cleaned);
}

class Responder {
 public:
  Responder(Rng& rng, const SynonymLexicon& lex) : rng_(rng), lex_(lex) {}

  bool chance(double p) { return uniform_unit(rng_) < p; }

  std::string rating(double quality) {
    quality = std::clamp(quality, 0.0, 1.0);
    int r = 1 + static_cast<int>(quality * 2.0 + 0.5);
    if (chance(0.25)) r += chance(0.5) ? 1 : -1;
    r = std::clamp(r, 1, 3);
    switch (uniform_index(rng_, 4)) {
      case 0: return std::to_string(r);
      case 1: return "Rating: " + std::to_string(r) + "\nMost words fit the theme.";
      case 2: return "I would rate this a " + std::to_string(r) + ".";
      default: return "The rate is: " + std::to_string(r);
    }
  }

  std::string list(const std::vector<std::string>& items, std::string_view empty_reply) {
    if (items.empty()) return std::string(empty_reply);
    const auto body = join(items, ", ");
    switch (uniform_index(rng_, 3)) {
      case 0: return "[" + body + "]";
      case 1: return "The words are: " + body;
      default: return body;
    }
  }

  std::string pairs(const std::vector<WordPair>& items) {
    if (items.empty()) return "[ ]";
    std::vector<std::string> parts;
    for (const auto& [a, b] : items) parts.push_back("(" + a + ", " + b + ")");
    return join(parts, ", ");
  }

  std::vector<std::string> nonwords(const std::vector<std::string>& words) {
    std::vector<std::string> out;
    for (const auto& w : words) {
      if (looks_nonword(w) ? chance(0.9) : chance(0.03)) out.push_back(w);
    }
    return out;
  }

  std::vector<std::string> outliers(const std::vector<std::string>& words) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& w : words) {
      double s = 0.0;
      for (const auto& o : words) {
        if (o != w) s += bigram_similarity(w, o) + (lex_.same_concept(w, o) ? 1.0 : 0.0);
      }
      scored.emplace_back(s, w);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    if (!scored.empty() && chance(0.55)) out.push_back(scored[0].second);
    if (scored.size() > 1 && chance(0.1)) out.push_back(scored[1].second);
    return out;
  }

  std::vector<WordPair> duplicates(const std::vector<std::string>& words) {
    std::vector<WordPair> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t j = i + 1; j < words.size(); ++j) {
        if (looks_duplicate(words[i], words[j], lex_) && chance(0.85)) out.emplace_back(words[i], words[j]);
      }
    }
    return out;
  }

 private:
  Rng& rng_;
  const SynonymLexicon& lex_;
};

}  // namespace

ScriptedJudge::ScriptedJudge(std::uint64_t seed, double garbage_rate) : seed_(seed), garbage_rate_(garbage_rate) {}

ChatResponse ScriptedJudge::complete(const ChatRequest& request) {
  static const SynonymLexicon lex = SynonymLexicon::builtin();
  Rng rng(derive_seed(derive_seed(seed_, fnv1a64(request.prompt)), static_cast<std::uint64_t>(request.sample_index)));
  Responder say(rng, lex);

  const auto matched = library_.match(request.prompt);
  if (!matched) return {200, "I am not sure what is being asked.", ""};
  const auto& [metric, slots] = *matched;
  const auto words = words_of(slots, Slot::kTopicWords);

  if (say.chance(garbage_rate_)) return {200, "I'm sorry, I can't evaluate this word set.", ""};

  switch (metric) {
    case MetricId::kLRate: {
      const auto bad = std::count_if(words.begin(), words.end(), [](const auto& w) { return looks_nonword(w); });
      const double frac = words.empty() ? 0.0 : static_cast<double>(bad) / static_cast<double>(words.size());
      return {200, say.rating(1.0 - 3.0 * frac), ""};
    }
    case MetricId::kCRate: {
      double sim = 0.0;
      for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = i + 1; j < words.size(); ++j) sim += bigram_similarity(words[i], words[j]);
      }
      const double pairs = static_cast<double>(words.size() * (words.size() - 1) / 2);
      return {200, say.rating(0.55 + (pairs > 0 ? 4.0 * sim / pairs : 0.0)), ""};
    }
    case MetricId::kRRate: {
      const auto dups = say.duplicates(words);
      return {200, say.rating(dups.empty() ? 1.0 : dups.size() == 1 ? 0.5 : 0.0), ""};
    }
    case MetricId::kDRate: {
      const auto a = words_of(slots, Slot::kTopicWords1);
      const auto b = words_of(slots, Slot::kTopicWords2);
      const std::set<std::string> sa(a.begin(), a.end());
      std::size_t shared = 0;
      for (const auto& w : b) shared += sa.count(w);
      const double denom = static_cast<double>(std::max<std::size_t>(1, std::min(a.size(), b.size())));
      return {200, say.rating(1.0 - 3.0 * static_cast<double>(shared) / denom), ""};
    }
    case MetricId::kLNonword:
      return {200, say.list(say.nonwords(words), "[ ]"), ""};
    case MetricId::kAdvNonword: {
      const auto flagged = say.nonwords(words);
      auto text = say.list(flagged, "[ ]");
      if (!flagged.empty()) text += "\nExplanation: these strings are not recognizable English words.";
      return {200, text, ""};
    }
    case MetricId::kCOutlier:
      return {200, say.list(say.outliers(words), "[ ]"), ""};
    case MetricId::kAdvOutlier:
      return {200, say.list(say.outliers(words), "No outliers"), ""};
    case MetricId::kRDuplicate:
    case MetricId::kAdvDuplicate:
      return {200, say.pairs(say.duplicates(words)), ""};
    case MetricId::kAIrtw: {
      const auto tokens = doc_tokens(slots.count(Slot::kDocument) ? slots.at(Slot::kDocument) : "");
      const std::set<std::string> present(tokens.begin(), tokens.end());
      std::vector<std::string> flagged;
      for (const auto& w : words) {
        if (!present.contains(w) && say.chance(0.7)) flagged.push_back(w);
      }
      return {200, say.list(flagged, "[ ]"), ""};
    }
    case MetricId::kAMissingTheme: {
      const auto tokens = doc_tokens(slots.count(Slot::kDocument) ? slots.at(Slot::kDocument) : "");
      const std::set<std::string> topic(words.begin(), words.end());
      std::vector<std::string> candidates;
      for (const auto& t : tokens) {
        if (t.size() >= 6 && !topic.contains(t) &&
            std::find(candidates.begin(), candidates.end(), t) == candidates.end()) {
          candidates.push_back(t);
        }
      }
      const auto n = uniform_index(rng, std::min<std::size_t>(3, candidates.size()) + 1);
      std::vector<std::string> themes;
      for (auto i : sample_without_replacement(candidates.size(), n, rng)) themes.push_back(candidates[i]);
      return {200, themes.empty() ? "[ ]" : join(themes, ", "), ""};
    }
  }
  return {200, "[ ]", ""};
}

}  // namespace topiceval
