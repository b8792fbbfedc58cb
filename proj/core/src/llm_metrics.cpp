#include "topiceval/llm_metrics.hpp"

#include <algorithm>
#include <functional>

#include "topiceval/parallel.hpp"
#include "topiceval/parsers.hpp"
#include "topiceval/random.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace {

template <typename Item>
VoteTally<Item> tally(const std::vector<std::vector<Item>>& samples) {
  VoteTally<Item> out;
  for (const auto& sample : samples) {
    std::vector<Item> seen;
    for (const auto& item : sample) {
      if (std::find(seen.begin(), seen.end(), item) != seen.end()) continue;
      seen.push_back(item);
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == item; });
      if (it == out.end()) {
        out.emplace_back(item, 1);
      } else {
        ++it->second;
      }
    }
  }
  return out;
}

PayloadParser parser_for(MetricId metric, const std::vector<std::string>& reference) {
  switch (metric_kind(metric)) {
    case MetricKind::kRating:
      return [](const std::string& raw) -> std::optional<Payload> {
        if (auto r = parse_rating(raw)) return Rating{*r};
        return std::nullopt;
      };
    case MetricKind::kWordSet:
      return [reference](const std::string& raw) -> std::optional<Payload> {
        return WordList{parse_word_list(raw, &reference)};
      };
    case MetricKind::kPairSet:
      return [reference](const std::string& raw) -> std::optional<Payload> {
        return PairList{parse_pair_list(raw, reference)};
      };
    case MetricKind::kThemeCount:
      return [](const std::string& raw) -> std::optional<Payload> { return ThemeList{parse_theme_list(raw)}; };
  }
  return {};
}

}  // namespace

VoteTally<std::string> tally_words(const std::vector<std::vector<std::string>>& samples) { return tally(samples); }
VoteTally<WordPair> tally_pairs(const std::vector<std::vector<WordPair>>& samples) { return tally(samples); }

Scope scope_of(MetricId metric) {
  switch (metric) {
    case MetricId::kDRate: return Scope::kPerPair;
    case MetricId::kAIrtw:
    case MetricId::kAMissingTheme: return Scope::kPerDocTopic;
    default: return Scope::kPerTopic;
  }
}

TargetJudgment aggregate_records(MetricId metric, const TargetRef& target, const std::string& llm_id,
                                 std::vector<JudgmentRecord> records, int n_samples) {
  std::stable_sort(records.begin(), records.end(),
                   [](const JudgmentRecord& a, const JudgmentRecord& b) { return a.sample_index < b.sample_index; });
  TargetJudgment out;
  out.metric_id = metric;
  out.target = target;
  out.llm_id = llm_id;

  std::vector<const Payload*> valid;
  for (const auto& r : records) {
    if (r.valid() && static_cast<int>(valid.size()) < n_samples) valid.push_back(&*r.parsed);
  }
  out.records = std::move(records);
  out.n_valid = static_cast<int>(valid.size());
  out.failed = out.n_valid < majority_threshold(n_samples);

  MetricScore score;
  score.metric_id = metric;
  score.scope = scope_of(metric);
  score.n_valid_samples = out.n_valid;
  double count_sum = 0.0;

  switch (metric_kind(metric)) {
    case MetricKind::kRating: {
      double sum = 0.0;
      for (const auto* p : valid) sum += std::get<Rating>(*p).value;
      score.aggregation = Aggregation::kMean;
      score.value = valid.empty() ? 0.0 : sum / static_cast<double>(valid.size());
      break;
    }
    case MetricKind::kWordSet: {
      std::vector<std::vector<std::string>> lists;
      for (const auto* p : valid) {
        lists.push_back(std::get<WordList>(*p).items);
        count_sum += static_cast<double>(lists.back().size());
      }
      out.word_votes = tally(lists);
      out.flagged = majority_items(out.word_votes, n_samples);
      score.aggregation = Aggregation::kMajorityCount;
      score.value = static_cast<double>(out.flagged.size());
      break;
    }
    case MetricKind::kPairSet: {
      std::vector<std::vector<WordPair>> lists;
      for (const auto* p : valid) {
        lists.push_back(std::get<PairList>(*p).items);
        count_sum += static_cast<double>(lists.back().size());
      }
      out.pair_votes = tally(lists);
      out.flagged_pairs = majority_items(out.pair_votes, n_samples);
      score.aggregation = Aggregation::kMajorityCount;
      score.value = static_cast<double>(out.flagged_pairs.size());
      break;
    }
    case MetricKind::kThemeCount: {
      for (const auto* p : valid) count_sum += static_cast<double>(std::get<ThemeList>(*p).items.size());
      score.aggregation = Aggregation::kMeanCount;
      score.value = valid.empty() ? 0.0 : count_sum / static_cast<double>(valid.size());
      break;
    }
  }
  if (metric_kind(metric) != MetricKind::kRating && !valid.empty()) {
    out.mean_count = count_sum / static_cast<double>(valid.size());
  }
  if (!out.failed) out.score = score;
  return out;
}

PairStrategy PairStrategy::parse(std::string_view text) {
  const auto t = trim(text);
  if (t == "all" || t == "all-pairs") return {};
  if (t.starts_with("sample:")) {
    try {
      const auto n = std::stoll(std::string(t.substr(7)));
      if (n > 0) return {false, static_cast<std::size_t>(n)};
    } catch (const std::logic_error&) {
    }
  }
  throw ValidationError("pairs_strategy", "expected 'all' or 'sample:N' with N > 0, got '" + std::string(t) + "'");
}

std::string PairStrategy::describe() const {
  return all_pairs ? "all" : "sample:" + std::to_string(sample_n);
}

std::vector<std::pair<int, int>> select_topic_pairs(const TopicModelOutput& model, const PairStrategy& strategy,
                                                    std::uint64_t seed, Diagnostics* diag) {
  std::vector<int> ids;
  for (const auto& t : model.topics) ids.push_back(t.topic_id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::pair<int, int>> all;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) all.emplace_back(ids[i], ids[j]);
  }
  if (strategy.all_pairs) return all;
  std::size_t n = strategy.sample_n;
  if (n > all.size()) {
    warn(diag, "pair sample of " + std::to_string(n) + " exceeds the " + std::to_string(all.size()) +
                   " available topic pairs; clamped");
    n = all.size();
  }
  Rng rng(derive_seed(seed, "topic-pairs"));
  auto idx = sample_without_replacement(all.size(), n, rng);
  std::sort(idx.begin(), idx.end());
  std::vector<std::pair<int, int>> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

std::map<std::string, int> primary_topics(const std::vector<DocTopicAssignment>& assignments) {
  std::map<std::string, std::pair<double, int>> best;
  for (const auto& a : assignments) {
    const double w = a.weight.value_or(2.0);  // HARD outranks any weight
    auto it = best.find(a.doc_id);
    if (it == best.end() || w > it->second.first || (w == it->second.first && a.topic_id < it->second.second)) {
      best[a.doc_id] = {w, a.topic_id};
    }
  }
  std::map<std::string, int> out;
  for (const auto& [doc, wt] : best) out[doc] = wt.second;
  return out;
}

std::vector<DocumentTopicPair> sample_doc_topic_pairs(const TopicModelOutput& model, const Corpus& corpus,
                                                      const std::vector<DocTopicAssignment>& assignments,
                                                      std::size_t per_topic, std::uint64_t seed,
                                                      Diagnostics* diag) {
  const auto primary = primary_topics(assignments);
  std::map<int, std::vector<std::string>> members;
  for (const auto& doc : corpus) {
    auto it = primary.find(doc.doc_id);
    if (it != primary.end()) members[it->second].push_back(doc.doc_id);
  }
  std::vector<DocumentTopicPair> out;
  for (const auto& topic : model.topics) {
    const auto& docs = members[topic.topic_id];
    if (docs.empty()) {
      warn(diag, "topic " + std::to_string(topic.topic_id) + " has no assigned documents; no pairs sampled");
      continue;
    }
    const auto topic_seed = derive_seed(seed, static_cast<std::uint64_t>(topic.topic_id));
    Rng rng(topic_seed);
    auto idx = sample_without_replacement(docs.size(), per_topic, rng);
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) out.push_back({docs[i], topic.topic_id, topic_seed});
  }
  return out;
}

TargetJudgment MetricEvaluator::run(MetricId metric, const TargetRef& target, const SlotValues& slots,
                                    const std::vector<std::string>& reference) {
  const auto prompt = prompts_.render(metric, slots);
  auto sampled = gateway_.judge(prompt, target, parser_for(metric, reference));
  return aggregate_records(metric, target, gateway_.config().llm_id, std::move(sampled.records),
                           gateway_.config().n_samples);
}

TargetJudgment MetricEvaluator::eval_topic(MetricId metric, const Topic& topic) {
  return run(metric, TopicTarget{topic.topic_id}, {{Slot::kTopicWords, render_word_list(topic.words)}},
             topic.words);
}

TargetJudgment MetricEvaluator::eval_pair(const Topic& a, const Topic& b) {
  const Topic& lo = a.topic_id < b.topic_id ? a : b;
  const Topic& hi = a.topic_id < b.topic_id ? b : a;
  return run(MetricId::kDRate, PairTarget{lo.topic_id, hi.topic_id},
             {{Slot::kTopicWords1, render_word_list(lo.words)}, {Slot::kTopicWords2, render_word_list(hi.words)}},
             {});
}

TargetJudgment MetricEvaluator::eval_doc(MetricId metric, const Document& doc, int topic_id,
                                         const std::vector<std::string>& prompt_words) {
  return run(metric, DocTarget{doc.doc_id, topic_id},
             {{Slot::kDocument, doc.text}, {Slot::kTopicWords, render_word_list(prompt_words)}}, prompt_words);
}

TargetJudgment MetricEvaluator::eval_words(MetricId metric, const TargetRef& target,
                                           const std::vector<std::string>& words, SlotValues extra_slots) {
  extra_slots[Slot::kTopicWords] = render_word_list(words);
  return run(metric, target, extra_slots, words);
}

std::vector<ModelLevelScore> aggregate_model_level(const std::vector<TargetJudgment>& judgments) {
  std::vector<ModelLevelScore> out;
  auto slot = [&](MetricId m, Aggregation agg) -> ModelLevelScore& {
    for (auto& s : out) {
      if (s.metric_id == m && s.aggregation == agg) return s;
    }
    out.push_back({m, agg, std::nullopt, 0, 0});
    return out.back();
  };
  std::map<std::pair<MetricId, Aggregation>, std::pair<double, std::size_t>> sums;
  for (const auto& j : judgments) {
    const auto primary = j.score ? j.score->aggregation
                                 : (metric_kind(j.metric_id) == MetricKind::kRating ? Aggregation::kMean
                                    : metric_kind(j.metric_id) == MetricKind::kThemeCount
                                        ? Aggregation::kMeanCount
                                        : Aggregation::kMajorityCount);
    auto& s = slot(j.metric_id, primary);
    ++s.n_targets;
    if (j.failed) {
      ++s.n_failed;
    } else {
      auto& acc = sums[{j.metric_id, primary}];
      acc.first += j.score->value;
      ++acc.second;
    }
    if (j.metric_id == MetricId::kAIrtw) {
      auto& mc = slot(j.metric_id, Aggregation::kMeanCount);
      ++mc.n_targets;
      if (j.failed || !j.mean_count) {
        ++mc.n_failed;
      } else {
        auto& acc = sums[{j.metric_id, Aggregation::kMeanCount}];
        acc.first += *j.mean_count;
        ++acc.second;
      }
    }
  }
  for (auto& s : out) {
    const auto it = sums.find({s.metric_id, s.aggregation});
    if (it != sums.end() && it->second.second > 0) s.value = it->second.first / static_cast<double>(it->second.second);
  }
  return out;
}

JudgeRun evaluate_model(const TopicModelOutput& model, const Corpus* corpus,
                        const std::vector<DocTopicAssignment>* assignments, Gateway& gateway,
                        const PromptLibrary& prompts, const JudgeOptions& options, Diagnostics* diag) {
  JudgeRun run;
  run.model_name = model.model_name;
  run.dataset_name = model.dataset_name;
  run.num_topics = model.num_topics;
  run.llm_id = gateway.config().llm_id;
  run.n_samples = gateway.config().n_samples;

  auto wants = [&](MetricId m) {
    return std::find(options.metrics.begin(), options.metrics.end(), m) != options.metrics.end();
  };
  const bool needs_docs = wants(MetricId::kAIrtw) || wants(MetricId::kAMissingTheme);
  if (needs_docs && (!corpus || !assignments)) {
    throw std::invalid_argument("alignment metrics need a corpus and document-topic assignments");
  }

  MetricEvaluator eval(gateway, prompts);
  std::vector<std::function<TargetJudgment()>> tasks;

  for (auto metric : kJudgeMetrics) {
    if (!wants(metric) || scope_of(metric) != Scope::kPerTopic) continue;
    for (const auto& topic : model.topics) {
      tasks.push_back([&eval, metric, &topic] { return eval.eval_topic(metric, topic); });
    }
  }
  if (wants(MetricId::kDRate)) {
    for (const auto& [a, b] : select_topic_pairs(model, options.pairs, options.seed, diag)) {
      const Topic* ta = model.find(a);
      const Topic* tb = model.find(b);
      tasks.push_back([&eval, ta, tb] { return eval.eval_pair(*ta, *tb); });
    }
  }
  if (needs_docs) {
    run.doc_pairs = sample_doc_topic_pairs(model, *corpus, *assignments, options.per_topic_docs, options.seed, diag);
    const auto index = index_corpus(*corpus);
    // Topics a document belongs to, for the union variant.
    std::map<std::string, std::vector<int>> doc_topics;
    for (const auto& a : *assignments) {
      if (!a.weight || *a.weight >= options.union_min_weight) doc_topics[a.doc_id].push_back(a.topic_id);
    }
    for (const auto& pair : run.doc_pairs) {
      const Document* doc = &(*corpus)[index.at(pair.doc_id)];
      const Topic* topic = model.find(pair.topic_id);
      if (wants(MetricId::kAIrtw)) {
        tasks.push_back([&eval, doc, topic] { return eval.eval_doc(MetricId::kAIrtw, *doc, topic->topic_id, topic->words); });
      }
      if (wants(MetricId::kAMissingTheme)) {
        std::vector<std::string> words = topic->words;
        if (options.missing_theme_union) {
          auto ids = doc_topics[doc->doc_id];
          std::sort(ids.begin(), ids.end());
          for (int id : ids) {
            if (id == topic->topic_id) continue;
            for (const auto& w : model.find(id)->words) {
              if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
            }
          }
        }
        tasks.push_back([&eval, doc, topic, words] {
          return eval.eval_doc(MetricId::kAMissingTheme, *doc, topic->topic_id, words);
        });
      }
    }
  }

  run.judgments.resize(tasks.size());
  const int threads = options.threads > 0 ? options.threads : gateway.config().max_in_flight;
  parallel_for(tasks.size(), threads, [&](std::size_t i) { run.judgments[i] = tasks[i](); });
  for (const auto& j : run.judgments) {
    if (j.failed) {
      warn(diag, std::string(to_string(j.metric_id)) + " " + target_label(j.target) + ": only " +
                     std::to_string(j.n_valid) + " valid samples; judgment failed");
    }
  }
  run.model_level = aggregate_model_level(run.judgments);
  return run;
}

std::string scores_csv_header() {
  return "model,dataset,k,llm,metric,scope,target,value,aggregation,n_valid_samples,n_targets,n_failed\n";
}

std::string scores_csv_rows(const JudgeRun& run) {
  std::string out;
  const std::string prefix = csv_field(run.model_name) + "," + csv_field(run.dataset_name) + "," +
                             std::to_string(run.num_topics) + "," + csv_field(run.llm_id) + ",";
  for (const auto& j : run.judgments) {
    const auto agg = j.score ? j.score->aggregation : Aggregation::kMean;
    out += prefix + std::string(to_string(j.metric_id)) + "," + std::string(to_string(scope_of(j.metric_id))) + "," +
           csv_field(target_label(j.target)) + "," + (j.score ? format_double(j.score->value) : "") + "," +
           (j.score ? std::string(to_string(agg)) : "failed") + "," + std::to_string(j.n_valid) + ",,\n";
  }
  for (const auto& s : run.model_level) {
    out += prefix + std::string(to_string(s.metric_id)) + ",model-level,," + (s.value ? format_double(*s.value) : "") +
           "," + std::string(to_string(s.aggregation)) + ",," + std::to_string(s.n_targets) + "," +
           std::to_string(s.n_failed) + "\n";
  }
  return out;
}

std::vector<ScoreRow> parse_scores_csv(std::string_view csv) {
  std::vector<ScoreRow> out;
  const auto lines = split_lines(csv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const auto f = parse_csv_line(lines[n]);
    if (!f.empty() && f[0] == "model") continue;
    const std::string where = "scores.csv:" + std::to_string(n + 1);
    if (f.size() != 12) throw ValidationError(where, "expected 12 columns");
    ScoreRow row;
    try {
      row.model = f[0];
      row.dataset = f[1];
      row.k = std::stoi(f[2]);
      row.llm = f[3];
      row.metric = f[4];
      row.scope = f[5];
      row.target = f[6];
      if (!f[7].empty()) row.value = std::stod(f[7]);
      row.aggregation = f[8];
      if (!f[9].empty()) row.n_valid_samples = std::stoi(f[9]);
      if (!f[10].empty()) row.n_targets = std::stoul(f[10]);
      if (!f[11].empty()) row.n_failed = std::stoul(f[11]);
    } catch (const std::logic_error&) {
      throw ValidationError(where, "malformed number");
    }
    if (!parse_metric_id(row.metric)) throw ValidationError(where, "unknown metric '" + row.metric + "'");
    out.push_back(std::move(row));
  }
  return out;
}

std::string flagged_jsonl(const JudgeRun& run) {
  std::string out;
  for (const auto& j : run.judgments) {
    const auto kind = metric_kind(j.metric_id);
    if (kind != MetricKind::kWordSet && kind != MetricKind::kPairSet) continue;
    nlohmann::json line = {{"metric_id", to_string(j.metric_id)},
                           {"llm_id", j.llm_id},
                           {"target_ref", target_to_json(j.target)},
                           {"failed", j.failed}};
    nlohmann::json votes = nlohmann::json::array();
    if (kind == MetricKind::kWordSet) {
      for (const auto& [w, v] : j.word_votes) votes.push_back({{"item", w}, {"votes", v}});
      line["flagged"] = j.flagged;
    } else {
      for (const auto& [p, v] : j.pair_votes) votes.push_back({{"item", {p.first, p.second}}, {"votes", v}});
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& p : j.flagged_pairs) pairs.push_back({p.first, p.second});
      line["flagged"] = pairs;
    }
    line["votes"] = votes;
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace topiceval
