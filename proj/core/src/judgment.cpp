#include "topiceval/judgment.hpp"

#include <stdexcept>

#include "topiceval/interchange.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

using nlohmann::json;

namespace {

struct MetricName {
  MetricId id;
  std::string_view name;
};

constexpr std::array<MetricName, 12> kMetricNames = {{
    {MetricId::kLRate, "L_rate"},
    {MetricId::kLNonword, "L_nonword"},
    {MetricId::kCRate, "C_rate"},
    {MetricId::kCOutlier, "C_outlier"},
    {MetricId::kRRate, "R_rate"},
    {MetricId::kRDuplicate, "R_duplicate"},
    {MetricId::kDRate, "D_rate"},
    {MetricId::kAIrtw, "A_ir-tw"},
    {MetricId::kAMissingTheme, "A_missing-theme"},
    {MetricId::kAdvNonword, "AdvT_nonword"},
    {MetricId::kAdvOutlier, "AdvT_outlier"},
    {MetricId::kAdvDuplicate, "AdvT_duplicate"},
}};

}  // namespace

std::string_view to_string(MetricId id) {
  for (const auto& m : kMetricNames) {
    if (m.id == id) return m.name;
  }
  return "unknown";
}

std::optional<MetricId> parse_metric_id(std::string_view name) {
  for (const auto& m : kMetricNames) {
    if (m.name == name) return m.id;
  }
  return std::nullopt;
}

MetricKind metric_kind(MetricId id) {
  switch (id) {
    case MetricId::kLRate:
    case MetricId::kCRate:
    case MetricId::kRRate:
    case MetricId::kDRate:
      return MetricKind::kRating;
    case MetricId::kLNonword:
    case MetricId::kCOutlier:
    case MetricId::kAIrtw:
    case MetricId::kAdvNonword:
    case MetricId::kAdvOutlier:
      return MetricKind::kWordSet;
    case MetricId::kRDuplicate:
    case MetricId::kAdvDuplicate:
      return MetricKind::kPairSet;
    case MetricId::kAMissingTheme:
      return MetricKind::kThemeCount;
  }
  return MetricKind::kRating;
}

bool is_lower_better(MetricId id) { return metric_kind(id) != MetricKind::kRating; }

std::string target_label(const TargetRef& target) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TopicTarget>) {
          return "topic:" + std::to_string(t.topic_id);
        } else if constexpr (std::is_same_v<T, PairTarget>) {
          return "pair:" + std::to_string(t.topic_a) + "-" + std::to_string(t.topic_b);
        } else {
          return "doc:" + t.doc_id + "@" + std::to_string(t.topic_id);
        }
      },
      target);
}

std::string_view to_string(Scope scope) {
  switch (scope) {
    case Scope::kPerTopic: return "per-topic";
    case Scope::kPerPair: return "per-pair";
    case Scope::kPerDocTopic: return "per-doc-topic";
    case Scope::kModelLevel: return "model-level";
  }
  return "unknown";
}

std::string_view to_string(Aggregation agg) {
  switch (agg) {
    case Aggregation::kMean: return "mean";
    case Aggregation::kMajorityCount: return "majority-count";
    case Aggregation::kMeanCount: return "mean-count";
  }
  return "unknown";
}

json target_to_json(const TargetRef& target) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TopicTarget>) {
          return {{"topic_id", t.topic_id}};
        } else if constexpr (std::is_same_v<T, PairTarget>) {
          return {{"topic_id_a", t.topic_a}, {"topic_id_b", t.topic_b}};
        } else {
          return {{"doc_id", t.doc_id}, {"topic_id", t.topic_id}};
        }
      },
      target);
}

TargetRef target_from_json(const json& t) {
  if (t.contains("doc_id")) return DocTarget{t.at("doc_id").get<std::string>(), t.at("topic_id").get<int>()};
  if (t.contains("topic_id_a")) return PairTarget{t.at("topic_id_a").get<int>(), t.at("topic_id_b").get<int>()};
  return TopicTarget{t.at("topic_id").get<int>()};
}

json to_json(const JudgmentRecord& r) {
  json target = target_to_json(r.target);
  json parsed = nullptr;
  if (r.parsed) {
    parsed = std::visit(
        [](const auto& p) -> json {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Rating>) {
            return {{"rating", p.value}};
          } else if constexpr (std::is_same_v<T, WordList>) {
            return {{"words", p.items}};
          } else if constexpr (std::is_same_v<T, PairList>) {
            json pairs = json::array();
            for (const auto& [a, b] : p.items) pairs.push_back(json::array({a, b}));
            return {{"pairs", std::move(pairs)}};
          } else {
            return {{"themes", p.items}};
          }
        },
        *r.parsed);
  }

  return json{{"metric_id", to_string(r.metric_id)},
              {"target_ref", std::move(target)},
              {"llm_id", r.llm_id},
              {"sample_index", r.sample_index},
              {"prompt_hash", to_hex64(r.prompt_hash)},
              {"raw_text", r.raw_text},
              {"parsed", std::move(parsed)},
              {"valid", r.valid()}};
}

JudgmentRecord judgment_from_json(const json& j) {
  JudgmentRecord r;
  const auto metric = parse_metric_id(j.at("metric_id").get<std::string>());
  if (!metric) throw ValidationError("metric_id", "unknown metric '" + j.at("metric_id").dump() + "'");
  r.metric_id = *metric;
  r.target = target_from_json(j.at("target_ref"));
  r.llm_id = j.at("llm_id").get<std::string>();
  r.sample_index = j.at("sample_index").get<int>();
  r.prompt_hash = from_hex64(j.at("prompt_hash").get<std::string>());
  r.raw_text = j.at("raw_text").get<std::string>();
  const auto& p = j.at("parsed");
  if (!p.is_null()) {
    if (p.contains("rating")) {
      r.parsed = Rating{p.at("rating").get<int>()};
    } else if (p.contains("words")) {
      r.parsed = WordList{p.at("words").get<std::vector<std::string>>()};
    } else if (p.contains("pairs")) {
      PairList pl;
      for (const auto& pair : p.at("pairs")) {
        pl.items.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
      }
      r.parsed = std::move(pl);
    } else if (p.contains("themes")) {
      r.parsed = ThemeList{p.at("themes").get<std::vector<std::string>>()};
    } else {
      throw ValidationError("parsed", "unrecognized payload " + p.dump());
    }
  }
  const bool valid = j.at("valid").get<bool>();
  if (valid != r.valid()) throw ValidationError("valid", "valid flag disagrees with parsed payload");
  return r;
}

std::string uniqueness_key(const JudgmentRecord& r) {
  return std::string(to_string(r.metric_id)) + "|" + target_label(r.target) + "|" + r.llm_id + "|" +
         std::to_string(r.sample_index) + "|" + to_hex64(r.prompt_hash);
}

void JudgmentStore::append(JudgmentRecord record) {
  std::lock_guard lock(mu_);
  auto key = uniqueness_key(record);
  if (!keys_.insert(key).second) {
    throw std::logic_error("duplicate judgment record " + key);
  }
  records_.push_back(std::move(record));
}

bool JudgmentStore::append_if_new(JudgmentRecord record) {
  std::lock_guard lock(mu_);
  if (!keys_.insert(uniqueness_key(record)).second) return false;
  records_.push_back(std::move(record));
  return true;
}

std::string JudgmentStore::serialize() const {
  std::string out;
  for (const auto& r : records_) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void JudgmentStore::write(const std::string& path) const { write_file(path, serialize()); }

std::vector<JudgmentRecord> JudgmentStore::parse(std::string_view jsonl) {
  std::vector<JudgmentRecord> out;
  const auto lines = split_lines(jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    try {
      out.push_back(judgment_from_json(json::parse(lines[n])));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ValidationError("judgments.jsonl:" + std::to_string(n + 1), e.what());
    }
  }
  return out;
}

std::vector<JudgmentRecord> JudgmentStore::load(const std::string& path) {
  return parse(read_file(path));
}

}  // namespace topiceval
