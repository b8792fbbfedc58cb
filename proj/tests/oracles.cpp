#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "topiceval/random.hpp"

namespace topiceval::testing {

std::size_t OracleCounts::pair(const std::string& a, const std::string& b) const {
  const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  const auto it = cooc.find(key);
  return it == cooc.end() ? 0 : it->second;
}

std::vector<std::vector<std::string>> enumerate_units(const std::vector<std::vector<std::string>>& docs,
                                                      const std::vector<std::string>& vocab, std::size_t window) {
  const std::set<std::string> v(vocab.begin(), vocab.end());
  std::vector<std::vector<std::string>> units;
  for (const auto& doc : docs) {
    std::vector<std::string> kept;
    for (const auto& t : doc) {
      if (v.count(t)) kept.push_back(t);
    }
    // A document with no vocabulary tokens contributes no unit at all.
    if (kept.empty()) continue;
    if (window == 0 || kept.size() <= window) {
      units.push_back(kept);
      continue;
    }
    for (std::size_t start = 0; start + window <= kept.size(); ++start) {
      units.emplace_back(kept.begin() + static_cast<std::ptrdiff_t>(start),
                         kept.begin() + static_cast<std::ptrdiff_t>(start + window));
    }
  }
  return units;
}

OracleCounts brute_force_counts(const std::vector<std::vector<std::string>>& docs,
                                const std::vector<std::string>& vocab, std::size_t window) {
  OracleCounts out;
  for (const auto& unit : enumerate_units(docs, vocab, window)) {
    ++out.units;
    const std::set<std::string> present(unit.begin(), unit.end());
    for (const auto& a : present) {
      ++out.occ[a];
      for (const auto& b : present) {
        if (a < b) ++out.cooc[{a, b}];
      }
    }
  }
  return out;
}

namespace {

std::size_t occ_of(const OracleCounts& c, const std::string& w) {
  const auto it = c.occ.find(w);
  return it == c.occ.end() ? 0 : it->second;
}

std::vector<std::string> present_only(const std::vector<std::string>& words, const OracleCounts& c) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    if (occ_of(c, w) > 0) out.push_back(w);
  }
  return out;
}

}  // namespace

double oracle_umass(std::vector<std::string> words, const OracleCounts& c) {
  words = present_only(words, c);
  // Descending document frequency; ties in topic order.
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (std::size_t i = 0; i < words.size(); ++i) ranked.emplace_back(i, words[i]);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
    const auto ox = occ_of(c, x.second);
    const auto oy = occ_of(c, y.second);
    return ox != oy ? ox > oy : x.first < y.first;
  });
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& wi = ranked[i].second;
      const auto& wj = ranked[j].second;
      sum += std::log((static_cast<double>(c.pair(wi, wj)) + 1.0) / static_cast<double>(occ_of(c, wj)));
      ++n;
    }
  }
  return sum / n;
}

double oracle_uci(const std::vector<std::string>& all, const OracleCounts& c) {
  const auto words = present_only(all, c);
  const double n_units = static_cast<double>(c.units);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      const double pa = occ_of(c, words[i]) / n_units;
      const double pb = occ_of(c, words[j]) / n_units;
      const double pab = c.pair(words[i], words[j]) / n_units;
      sum += std::log((pab + 1e-12) / (pa * pb));
      ++n;
    }
  }
  return sum / n;
}

double oracle_npmi(const std::vector<std::string>& all, const OracleCounts& c) {
  const auto words = present_only(all, c);
  const double n_units = static_cast<double>(c.units);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      const double pa = occ_of(c, words[i]) / n_units;
      const double pb = occ_of(c, words[j]) / n_units;
      const double pab = c.pair(words[i], words[j]) / n_units;
      double term = 1.0;  // pair present in every unit
      if (pab < 1.0) term = std::log((pab + 1e-12) / (pa * pb)) / -std::log(pab + 1e-12);
      sum += std::max(-1.0, std::min(1.0, term));
      ++n;
    }
  }
  return sum / n;
}

double rbo_direct(const std::vector<std::string>& a, const std::vector<std::string>& b, double p) {
  const std::size_t depth = std::min(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t d = 1; d <= depth; ++d) {
    const std::set<std::string> pa(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
    const std::set<std::string> pb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(d));
    std::size_t inter = 0;
    for (const auto& x : pa) inter += pb.count(x);
    sum += std::pow(p, static_cast<double>(d - 1)) * static_cast<double>(inter) / static_cast<double>(d);
  }
  return (1.0 - p) * sum;
}

std::vector<std::vector<std::string>> fixture_docs() {
  return {
      {"apple", "banana", "apple", "cherry", "date", "banana", "zzz", "apple", "fig", "grape", "cherry", "apple"},
      {"banana", "cherry", "banana", "date"},
      {"fig", "grape", "fig", "zzz", "apple", "banana", "grape", "cherry", "date", "fig", "apple", "grape", "date"},
      {"cherry", "apple"},
      {"date", "fig", "grape", "banana", "apple", "cherry", "fig", "banana", "date", "grape", "cherry"},
      {"kiwi"},
  };
}

std::vector<std::string> fixture_vocab() {
  return {"apple", "banana", "cherry", "date", "fig", "grape", "kiwi"};
}

std::vector<Topic> themed_topic_pool(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> banks = {
      {"orbit", "rocket", "telescope", "satellite", "mission", "launch", "planet", "astronaut", "galaxy", "comet",
       "lunar", "shuttle", "nasa", "spacecraft", "probe"},
      {"team", "game", "season", "player", "coach", "league", "score", "goal", "playoff", "stadium", "fans",
       "tournament", "referee", "pitcher", "hockey"},
      {"recipe", "flour", "butter", "oven", "garlic", "salt", "pepper", "onion", "kitchen", "bake", "soup",
       "sauce", "pasta", "chef", "dough"},
      {"software", "driver", "disk", "printer", "windows", "memory", "install", "network", "keyboard", "monitor",
       "server", "laptop", "processor", "router", "database"},
      {"church", "faith", "bible", "prayer", "god", "scripture", "believer", "priest", "worship", "gospel",
       "sermon", "chapel", "saint", "psalm", "clergy"},
      {"election", "vote", "senate", "campaign", "candidate", "ballot", "congress", "policy", "governor",
       "parliament", "democrat", "republican", "legislation", "poll", "mayor"},
      {"doctor", "patient", "hospital", "disease", "treatment", "vaccine", "nurse", "surgery", "symptom",
       "clinic", "diagnosis", "therapy", "infection", "medicine", "virus"},
      {"soil", "crop", "harvest", "wheat", "farmer", "irrigation", "fertilizer", "livestock", "maize", "rice",
       "seed", "tractor", "pasture", "yield", "orchard"},
      {"market", "stock", "investor", "price", "trade", "bank", "inflation", "currency", "profit", "revenue",
       "dividend", "loan", "interest", "economy", "shares"},
      {"guitar", "album", "concert", "song", "band", "melody", "drummer", "lyrics", "orchestra", "piano",
       "singer", "chorus", "rhythm", "violin", "tune"},
  };
  Rng rng(seed);
  std::vector<Topic> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bank = banks[i % banks.size()];
    auto idx = sample_without_replacement(bank.size(), 10, rng);
    Topic t;
    t.topic_id = static_cast<int>(i);
    for (auto k : idx) t.words.push_back(bank[k]);
    out.push_back(std::move(t));
  }
  return out;
}

CaseAwareJudge::CaseAwareJudge(std::vector<AdversarialCase> cases, bool correct) : correct_(correct) {
  for (auto& c : cases) by_words_.emplace(render_word_list(c.perturbed_words), std::move(c));
}

ChatResponse CaseAwareJudge::complete(const ChatRequest& request) {
  const auto match = library_.match(request.prompt);
  if (!match) return {200, "I cannot help with that.", ""};
  const auto it = by_words_.find(match->second.at(Slot::kTopicWords));
  if (it == by_words_.end()) return {200, "[ ]", ""};
  const auto& c = it->second;
  std::vector<std::string> others;
  for (std::size_t i = 0; i < c.perturbed_words.size(); ++i) {
    if (i != c.position && c.perturbed_words[i] != c.anchor.value_or("")) others.push_back(c.perturbed_words[i]);
  }
  switch (match->first) {
    case MetricId::kAdvNonword:
    case MetricId::kAdvOutlier:
      return {200, correct_ ? c.injected : others.at(request.sample_index % others.size()), ""};
    case MetricId::kAdvDuplicate:
      if (correct_) return {200, "(" + *c.anchor + ", " + c.injected + ")", ""};
      return {200, "(" + others.at(0) + ", " + others.at(1) + ")", ""};
    default:
      return {200, "[ ]", ""};
  }
}

}  // namespace topiceval::testing
