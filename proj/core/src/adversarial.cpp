#include "topiceval/adversarial.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "topiceval/parallel.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace {

constexpr std::array<std::pair<AdvTest, std::string_view>, 3> kTestNames = {{
    {AdvTest::kNonword, "AdvT_nonword"},
    {AdvTest::kOutlier, "AdvT_outlier"},
    {AdvTest::kDuplicate, "AdvT_duplicate"},
}};

constexpr std::array<std::pair<PerturbCategory, std::string_view>, 5> kCategoryNames = {{
    {PerturbCategory::kGarble, "garble"},
    {PerturbCategory::kAbbreviation, "abbreviation"},
    {PerturbCategory::kCharSubstitution, "char-substitution"},
    {PerturbCategory::kIntruder, "intruder"},
    {PerturbCategory::kDuplicate, "duplicate"},
}};

bool is_vowel(char c) { return std::string_view("aeiou").find(c) != std::string_view::npos; }

char random_letter(Rng& rng) { return static_cast<char>('a' + uniform_index(rng, 26)); }

// Look-alike replacements. Punctuation the list parser trims ('.', '!', ...)
// is avoided so an injected token survives a round trip through a response.
std::string_view lookalikes(char c) {
  switch (c) {
    case 'a': return "@4";
    case 'e': return "3";
    case 'i': return "1";
    case 'o': return "0";
    case 's': return "$5";
    case 't': return "7";
    case 'g': return "9%";
    case 'l': return "1";
    case 'b': return "8";
    case 'z': return "2";
    default: return "";
  }
}

std::vector<std::string> folded(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(fold_case(w));
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

AdversarialCase make_case(const Topic& topic, std::string injected, PerturbCategory category, Rng& rng) {
  AdversarialCase c;
  c.base_topic = topic;
  c.injected = std::move(injected);
  c.category = category;
  c.position = uniform_index(rng, topic.words.size() + 1);
  c.perturbed_words = topic.words;
  c.perturbed_words.insert(c.perturbed_words.begin() + static_cast<std::ptrdiff_t>(c.position), c.injected);
  return c;
}

}  // namespace

MetricId metric_of(AdvTest test) {
  switch (test) {
    case AdvTest::kNonword: return MetricId::kAdvNonword;
    case AdvTest::kOutlier: return MetricId::kAdvOutlier;
    case AdvTest::kDuplicate: return MetricId::kAdvDuplicate;
  }
  return MetricId::kAdvNonword;
}

std::string_view to_string(AdvTest test) {
  for (const auto& [t, name] : kTestNames) {
    if (t == test) return name;
  }
  return "unknown";
}

std::optional<AdvTest> parse_adv_test(std::string_view name) {
  for (const auto& [t, canonical] : kTestNames) {
    if (name == canonical || name == canonical.substr(5)) return t;
  }
  return std::nullopt;
}

std::string_view to_string(PerturbCategory c) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (cat == c) return name;
  }
  return "unknown";
}

std::optional<PerturbCategory> parse_perturb_category(std::string_view name) {
  for (const auto& [cat, canonical] : kCategoryNames) {
    if (name == canonical) return cat;
  }
  return std::nullopt;
}

void validate_case(const AdversarialCase& c) {
  const std::string where = "case " + c.case_id;
  if (c.base_topic.words.empty()) throw ValidationError(where, "base topic has no words");
  if (c.perturbed_words.size() != c.base_topic.words.size() + 1) {
    throw ValidationError(where, "perturbed list must be one word longer than the base topic");
  }
  if (c.position >= c.perturbed_words.size() || c.perturbed_words[c.position] != c.injected) {
    throw ValidationError(where, "injected word is not at the recorded position");
  }
  auto rest = c.perturbed_words;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(c.position));
  if (rest != c.base_topic.words) throw ValidationError(where, "perturbed list must equal base words plus one insertion");
  const auto base = folded(c.base_topic.words);
  if (contains(base, fold_case(c.injected))) throw ValidationError(where, "injected word already in the base topic");
  if (c.category == PerturbCategory::kDuplicate) {
    if (!c.anchor || !contains(c.base_topic.words, *c.anchor)) {
      throw ValidationError(where, "duplicate case needs an anchor from the base topic");
    }
  } else if (c.anchor) {
    throw ValidationError(where, "only duplicate cases carry an anchor");
  }
}

nlohmann::json to_json(const AdversarialCase& c) {
  return {{"case_id", c.case_id},
          {"base_topic", {{"id", c.base_topic.topic_id}, {"words", c.base_topic.words}}},
          {"perturbed_words", c.perturbed_words},
          {"injected", c.injected},
          {"anchor", c.anchor ? nlohmann::json(*c.anchor) : nlohmann::json(nullptr)},
          {"category", to_string(c.category)},
          {"seed", c.seed},
          {"position", c.position}};
}

AdversarialCase case_from_json(const nlohmann::json& j) {
  AdversarialCase c;
  try {
    c.case_id = j.at("case_id").get<std::string>();
    c.base_topic.topic_id = j.at("base_topic").at("id").get<int>();
    c.base_topic.words = j.at("base_topic").at("words").get<std::vector<std::string>>();
    c.perturbed_words = j.at("perturbed_words").get<std::vector<std::string>>();
    c.injected = j.at("injected").get<std::string>();
    if (j.contains("anchor") && !j.at("anchor").is_null()) c.anchor = j.at("anchor").get<std::string>();
    const auto cat = parse_perturb_category(j.at("category").get<std::string>());
    if (!cat) throw ValidationError("category", "unknown category " + j.at("category").dump());
    c.category = *cat;
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("position")) {
      c.position = j.at("position").get<std::size_t>();
    } else {
      const auto it = std::find(c.perturbed_words.begin(), c.perturbed_words.end(), c.injected);
      c.position = static_cast<std::size_t>(it - c.perturbed_words.begin());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("adversarial case", e.what());
  }
  validate_case(c);
  return c;
}

std::string serialize_cases(const std::vector<AdversarialCase>& cases) {
  std::string out;
  for (const auto& c : cases) out += to_json(c).dump() + "\n";
  return out;
}

std::vector<AdversarialCase> parse_cases(std::string_view jsonl) {
  std::vector<AdversarialCase> out;
  std::size_t n = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++n;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("cases:" + std::to_string(n), e.what());
    }
    out.push_back(case_from_json(j));
  }
  return out;
}

std::vector<AdversarialCase> load_cases(const std::string& path) { return parse_cases(read_file(path)); }

std::vector<Topic> sample_adversarial_topics(const std::vector<Topic>& pool, std::size_t n, std::uint64_t seed,
                                             Diagnostics* diag) {
  if (pool.size() <= n) {
    if (pool.size() < n) {
      warn(diag, "topic pool has " + std::to_string(pool.size()) + " topics, fewer than the " + std::to_string(n) +
                     " requested; using all of them");
    }
    return pool;
  }
  Rng rng(derive_seed(seed, "adversarial-topics"));
  std::vector<Topic> out;
  for (auto i : sample_without_replacement(pool.size(), n, rng)) out.push_back(pool[i]);
  return out;
}

std::string drop_vowels(std::string_view word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i == 0 || !is_vowel(static_cast<char>(std::tolower(static_cast<unsigned char>(word[i]))))) out += word[i];
  }
  return out;
}

std::string garble(std::string_view word, Rng& rng) {
  const std::string stripped = drop_vowels(word);
  if (uniform_index(rng, 2) == 0 && stripped.size() >= 3 && stripped != word) return stripped;
  std::string out(word);
  const auto edits = 1 + uniform_index(rng, 2);
  for (std::uint64_t e = 0; e < edits && out.size() >= 2; ++e) {
    const auto pos = uniform_index(rng, out.size());
    switch (uniform_index(rng, 3)) {
      case 0:
        out.erase(pos, 1);
        break;
      case 1: {
        const auto p = std::min<std::size_t>(pos, out.size() - 2);
        std::swap(out[p], out[p + 1]);
        break;
      }
      default: {
        char c = random_letter(rng);
        while (c == out[pos]) c = random_letter(rng);
        out[pos] = c;
      }
    }
  }
  return out;
}

std::string abbreviate(std::string_view word, Rng& rng) {
  const std::size_t len = 3 + uniform_index(rng, 2);
  std::string out(1, word.front());
  for (std::size_t i = 1; i < word.size() && out.size() < len; ++i) {
    if (!is_vowel(static_cast<char>(std::tolower(static_cast<unsigned char>(word[i]))))) out += word[i];
  }
  if (out.size() < 3) out = std::string(word.substr(0, len));
  return out;
}

std::string substitute_chars(std::string_view word, Rng& rng) {
  std::string out(word);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!lookalikes(static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])))).empty()) eligible.push_back(i);
  }
  if (eligible.empty()) {
    out[uniform_index(rng, out.size())] = "%#&"[uniform_index(rng, 3)];
    return out;
  }
  const auto k = 1 + uniform_index(rng, std::min<std::size_t>(3, eligible.size()));
  for (auto idx : sample_without_replacement(eligible.size(), k, rng)) {
    const auto pos = eligible[idx];
    const auto options = lookalikes(static_cast<char>(std::tolower(static_cast<unsigned char>(out[pos]))));
    out[pos] = options[uniform_index(rng, options.size())];
  }
  return out;
}

std::optional<AdversarialCase> gen_nonword_case(const Topic& topic, Rng& rng, const Vocabulary& vocab,
                                                Diagnostics* diag) {
  std::vector<std::string> sources;
  for (const auto& w : topic.words) {
    if (w.size() >= 4) sources.push_back(w);
  }
  if (sources.empty()) {
    warn(diag, "topic " + std::to_string(topic.topic_id) + " has no word of length >= 4; nonword case skipped");
    return std::nullopt;
  }
  const auto base = folded(topic.words);
  const auto category = static_cast<PerturbCategory>(uniform_index(rng, 3));
  for (int attempt = 0; attempt <= 10; ++attempt) {
    const auto& source = sources[uniform_index(rng, sources.size())];
    std::string token;
    switch (category) {
      case PerturbCategory::kGarble: token = garble(source, rng); break;
      case PerturbCategory::kAbbreviation: token = abbreviate(source, rng); break;
      default: token = substitute_chars(source, rng); break;
    }
    const auto f = fold_case(token);
    if (token.size() < 2 || f == fold_case(source) || vocab.contains(f) || contains(base, f)) continue;
    return make_case(topic, token, category, rng);
  }
  warn(diag, "topic " + std::to_string(topic.topic_id) + ": every " + std::string(to_string(category)) +
                 " candidate was a known word after 10 rerolls; nonword case skipped");
  return std::nullopt;
}

std::optional<AdversarialCase> gen_outlier_case(const Topic& topic, const std::vector<Topic>& donor_pool, Rng& rng,
                                                Diagnostics* diag) {
  const auto base = folded(topic.words);
  std::vector<const Topic*> donors;
  for (const auto& d : donor_pool) {
    const bool overlap = std::any_of(d.words.begin(), d.words.end(),
                                     [&](const std::string& w) { return contains(base, fold_case(w)); });
    if (!overlap && !d.words.empty()) donors.push_back(&d);
  }
  if (donors.empty()) {
    warn(diag, "topic " + std::to_string(topic.topic_id) + " has no zero-overlap donor; outlier case skipped");
    return std::nullopt;
  }
  const Topic& donor = *donors[uniform_index(rng, donors.size())];
  return make_case(topic, donor.words[uniform_index(rng, donor.words.size())], PerturbCategory::kIntruder, rng);
}

std::optional<AdversarialCase> gen_duplicate_case(const Topic& topic, const SynonymLexicon& lexicon, Rng& rng,
                                                  Diagnostics* diag) {
  const auto base = folded(topic.words);
  std::vector<std::pair<std::string, std::vector<std::string>>> anchors;
  for (const auto& w : topic.words) {
    std::vector<std::string> usable;
    for (auto& alt : lexicon.alternatives(w)) {
      if (!contains(base, alt)) usable.push_back(std::move(alt));
    }
    if (!usable.empty()) anchors.emplace_back(w, std::move(usable));
  }
  if (anchors.empty()) {
    warn(diag, "topic " + std::to_string(topic.topic_id) + " has no word with a usable lexicon entry; duplicate case skipped");
    return std::nullopt;
  }
  const auto& [anchor, alts] = anchors[uniform_index(rng, anchors.size())];
  auto c = make_case(topic, alts[uniform_index(rng, alts.size())], PerturbCategory::kDuplicate, rng);
  c.anchor = anchor;
  return c;
}

std::vector<AdversarialCase> generate_cases(AdvTest test, const std::vector<Topic>& topics,
                                            const CaseGenerationInputs& inputs, std::uint64_t seed,
                                            Diagnostics* diag) {
  std::vector<AdversarialCase> out;
  const auto stream = derive_seed(seed, to_string(test));
  const auto& donors = inputs.donor_pool.empty() ? topics : inputs.donor_pool;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const auto case_seed = derive_seed(stream, i);
    Rng rng(case_seed);
    std::optional<AdversarialCase> c;
    switch (test) {
      case AdvTest::kNonword: c = gen_nonword_case(topics[i], rng, inputs.vocab, diag); break;
      case AdvTest::kOutlier: c = gen_outlier_case(topics[i], donors, rng, diag); break;
      case AdvTest::kDuplicate: c = gen_duplicate_case(topics[i], inputs.lexicon, rng, diag); break;
    }
    if (!c) continue;
    char id[32];
    std::snprintf(id, sizeof id, "-%04zu", i);
    c->case_id = std::string(to_string(test)) + id;
    c->seed = case_seed;
    out.push_back(std::move(*c));
  }
  return out;
}

namespace {

bool payload_names(AdvTest test, const AdversarialCase& c, const Payload& p) {
  if (test == AdvTest::kDuplicate) {
    const auto* pairs = std::get_if<PairList>(&p);
    if (!pairs || !c.anchor) return false;
    return std::any_of(pairs->items.begin(), pairs->items.end(), [&](const WordPair& wp) {
      return (wp.first == *c.anchor && wp.second == c.injected) || (wp.first == c.injected && wp.second == *c.anchor);
    });
  }
  const auto* words = std::get_if<WordList>(&p);
  return words && contains(words->items, c.injected);
}

}  // namespace

bool is_hit(AdvTest test, const AdversarialCase& c, const TargetJudgment& j) {
  if (j.failed) return false;
  if (test == AdvTest::kDuplicate) {
    if (!c.anchor) return false;
    return std::any_of(j.flagged_pairs.begin(), j.flagged_pairs.end(), [&](const WordPair& wp) {
      return (wp.first == *c.anchor && wp.second == c.injected) || (wp.first == c.injected && wp.second == *c.anchor);
    });
  }
  return contains(j.flagged, c.injected);
}

AdversarialResult run_adversarial(const std::vector<AdversarialCase>& cases, AdvTest test, MetricEvaluator& eval,
                                  int threads, Diagnostics* diag) {
  AdversarialResult result;
  result.test = test;
  result.llm_id = eval.gateway().config().llm_id;
  result.n_cases = cases.size();
  const int n_samples = eval.gateway().config().n_samples;
  result.judgments.resize(cases.size());
  parallel_for(cases.size(), threads, [&](std::size_t i) {
    const auto& c = cases[i];
    SlotValues extra;
    if (test == AdvTest::kDuplicate) extra[Slot::kAnchor] = c.anchor.value_or("");
    result.judgments[i] = eval.eval_words(metric_of(test), TopicTarget{static_cast<int>(i)}, c.perturbed_words, extra);
  });

  double run_rate_sum = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& j = result.judgments[i];
    CaseOutcome o{cases[i].case_id, is_hit(test, cases[i], j), j.failed, j.n_valid, 0};
    int used = 0;
    for (const auto& r : j.records) {
      if (!r.valid() || used >= n_samples) continue;
      ++used;
      if (payload_names(test, cases[i], *r.parsed)) ++o.sample_hits;
    }
    run_rate_sum += static_cast<double>(o.sample_hits) / static_cast<double>(n_samples);
    if (o.hit) ++result.n_hits;
    if (o.failed) {
      ++result.n_failed;
      warn(diag, std::string(to_string(test)) + " " + o.case_id + ": judgment failed; counted as a miss");
    }
    result.outcomes.push_back(std::move(o));
  }
  if (!cases.empty()) {
    result.accuracy = static_cast<double>(result.n_hits) / static_cast<double>(cases.size());
    result.per_run_accuracy = run_rate_sum / static_cast<double>(cases.size());
  }
  return result;
}

std::string adversarial_csv_header() {
  return "test,llm,dataset,n_cases,n_hits,n_failed,accuracy,per_run_accuracy\n";
}

std::string adversarial_csv_row(const AdversarialResult& r) {
  return std::string(to_string(r.test)) + "," + csv_field(r.llm_id) + "," + csv_field(r.dataset) + "," +
         std::to_string(r.n_cases) + "," + std::to_string(r.n_hits) + "," + std::to_string(r.n_failed) + "," +
         format_double(r.accuracy) + "," + format_double(r.per_run_accuracy) + "\n";
}

std::vector<AdversarialResult> parse_adversarial_csv(std::string_view csv) {
  std::vector<AdversarialResult> out;
  const auto lines = split_lines(csv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const auto f = parse_csv_line(lines[n]);
    if (!f.empty() && f[0] == "test") continue;
    const std::string where = "adversarial.csv:" + std::to_string(n + 1);
    if (f.size() != 8) throw ValidationError(where, "expected 8 columns");
    const auto test = parse_adv_test(f[0]);
    if (!test) throw ValidationError(where, "unknown test '" + f[0] + "'");
    AdversarialResult r;
    r.test = *test;
    r.llm_id = f[1];
    r.dataset = f[2];
    try {
      r.n_cases = std::stoul(f[3]);
      r.n_hits = std::stoul(f[4]);
      r.n_failed = std::stoul(f[5]);
      r.accuracy = std::stod(f[6]);
      r.per_run_accuracy = std::stod(f[7]);
    } catch (const std::logic_error&) {
      throw ValidationError(where, "malformed number");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace topiceval
