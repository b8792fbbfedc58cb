#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace topiceval {

// Raised for any input that violates the interchange schemas. `field()`
// names the offending JSON path, e.g. "topics[2].words".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Topic {
  int topic_id = 0;
  std::vector<std::string> words;  // ranked, best first
  std::optional<std::vector<double>> weights;

  bool operator==(const Topic&) const = default;
};

struct TopicModelOutput {
  std::string model_name;
  std::string dataset_name;
  int num_topics = 0;
  std::vector<Topic> topics;

  const Topic* find(int topic_id) const;
  // "model/dataset/K<k>", used to label configurations in reports.
  std::string config_label() const;

  bool operator==(const TopicModelOutput&) const = default;
};

enum class Split { kTrain, kTest };

struct Document {
  std::string doc_id;
  std::string text;
  Split split = Split::kTrain;
  std::optional<std::vector<std::string>> labels;

  bool operator==(const Document&) const = default;
};

using Corpus = std::vector<Document>;

// One (document, topic) association. An absent weight is the HARD sentinel
// used by clustering models.
struct DocTopicAssignment {
  std::string doc_id;
  int topic_id = 0;
  std::optional<double> weight;

  bool is_hard() const noexcept { return !weight.has_value(); }
  bool operator==(const DocTopicAssignment&) const = default;
};

inline constexpr double kAssignmentSumTolerance = 1e-6;

TopicModelOutput validate_topics(std::string_view raw_json);
TopicModelOutput load_topics(const std::string& path);
nlohmann::json topics_to_json(const TopicModelOutput& model);
std::string serialize_topics(const TopicModelOutput& model);

Corpus parse_corpus(std::string_view raw_jsonl);
Corpus load_corpus(const std::string& path);
std::string serialize_corpus(const Corpus& corpus);

std::vector<DocTopicAssignment> validate_assignments(std::string_view raw_jsonl,
                                                     const TopicModelOutput& model,
                                                     const Corpus& corpus);
std::vector<DocTopicAssignment> load_assignments(const std::string& path,
                                                 const TopicModelOutput& model,
                                                 const Corpus& corpus);
std::string serialize_assignments(const std::vector<DocTopicAssignment>& assignments);

// Toolkit exporters write topics.json, assignments.jsonl and corpus.jsonl
// plus export.json: {"toolkit": str, "toolkit_version": str, "k": int, "m": int}.
struct ExportMetadata {
  std::string toolkit;
  std::string toolkit_version;
  int k = 0;
  int m = 0;

  bool operator==(const ExportMetadata&) const = default;
};

ExportMetadata parse_export_metadata(std::string_view raw_json);
nlohmann::json to_json(const ExportMetadata& meta);

struct ExportBundle {
  ExportMetadata meta;
  TopicModelOutput topics;
  Corpus corpus;
  std::vector<DocTopicAssignment> assignments;
};

// Validates all four files in `dir` and their mutual consistency: K topics,
// exactly M words each, assignments referencing the bundled corpus.
ExportBundle validate_export_bundle(const std::string& dir);

// doc_id -> position in corpus.
std::unordered_map<std::string, std::size_t> index_corpus(const Corpus& corpus);

}  // namespace topiceval
