#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace topiceval {

// The nine judge metrics followed by the three adversarial validation tests.
enum class MetricId {
  kLRate,
  kLNonword,
  kCRate,
  kCOutlier,
  kRRate,
  kRDuplicate,
  kDRate,
  kAIrtw,
  kAMissingTheme,
  kAdvNonword,
  kAdvOutlier,
  kAdvDuplicate,
};

inline constexpr std::array<MetricId, 9> kJudgeMetrics = {
    MetricId::kLRate,   MetricId::kLNonword,   MetricId::kCRate,
    MetricId::kCOutlier, MetricId::kRRate,     MetricId::kRDuplicate,
    MetricId::kDRate,   MetricId::kAIrtw,      MetricId::kAMissingTheme};

std::string_view to_string(MetricId id);
// Accepts the canonical names ("L_rate", "A_ir-tw", "AdvT_outlier", ...).
std::optional<MetricId> parse_metric_id(std::string_view name);

enum class MetricKind { kRating, kWordSet, kPairSet, kThemeCount };
MetricKind metric_kind(MetricId id);
bool is_lower_better(MetricId id);

struct TopicTarget {
  int topic_id = 0;
  auto operator<=>(const TopicTarget&) const = default;
};
struct PairTarget {
  int topic_a = 0;
  int topic_b = 0;
  auto operator<=>(const PairTarget&) const = default;
};
struct DocTarget {
  std::string doc_id;
  int topic_id = 0;
  auto operator<=>(const DocTarget&) const = default;
};
using TargetRef = std::variant<TopicTarget, PairTarget, DocTarget>;

std::string target_label(const TargetRef& target);
nlohmann::json target_to_json(const TargetRef& target);
TargetRef target_from_json(const nlohmann::json& j);

using WordPair = std::pair<std::string, std::string>;

struct Rating {
  int value = 0;
  bool operator==(const Rating&) const = default;
};
struct WordList {
  std::vector<std::string> items;
  bool operator==(const WordList&) const = default;
};
struct PairList {
  std::vector<WordPair> items;
  bool operator==(const PairList&) const = default;
};
struct ThemeList {
  std::vector<std::string> items;
  bool operator==(const ThemeList&) const = default;
};
using Payload = std::variant<Rating, WordList, PairList, ThemeList>;

struct JudgmentRecord {
  MetricId metric_id = MetricId::kLRate;
  TargetRef target;
  std::string llm_id;
  int sample_index = 0;
  std::uint64_t prompt_hash = 0;
  std::string raw_text;
  std::optional<Payload> parsed;  // absent <=> invalid

  bool valid() const noexcept { return parsed.has_value(); }
  bool operator==(const JudgmentRecord&) const = default;
};

nlohmann::json to_json(const JudgmentRecord& record);
JudgmentRecord judgment_from_json(const nlohmann::json& j);

enum class Scope { kPerTopic, kPerPair, kPerDocTopic, kModelLevel };
enum class Aggregation { kMean, kMajorityCount, kMeanCount };

std::string_view to_string(Scope scope);
std::string_view to_string(Aggregation agg);

struct MetricScore {
  MetricId metric_id = MetricId::kLRate;
  Scope scope = Scope::kPerTopic;
  double value = 0.0;
  int n_valid_samples = 0;
  Aggregation aggregation = Aggregation::kMean;
};

// Line-delimited store of judgment records. One writer appends; readers load
// whole files. Rejects records whose uniqueness key
// (metric, target, llm, sample_index, prompt_hash) was already written.
class JudgmentStore {
 public:
  void append(JudgmentRecord record);
  // Like append, but silently keeps the first record for a repeated key.
  bool append_if_new(JudgmentRecord record);
  const std::vector<JudgmentRecord>& records() const noexcept { return records_; }
  std::string serialize() const;
  void write(const std::string& path) const;

  static std::vector<JudgmentRecord> parse(std::string_view jsonl);
  static std::vector<JudgmentRecord> load(const std::string& path);

 private:
  std::mutex mu_;
  std::vector<JudgmentRecord> records_;
  std::unordered_set<std::string> keys_;
};

std::string uniqueness_key(const JudgmentRecord& record);

}  // namespace topiceval
