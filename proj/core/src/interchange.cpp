#include "topiceval/interchange.hpp"

#include <cmath>
#include <filesystem>
#include <unordered_set>

#include "topiceval/text.hpp"

namespace topiceval {

using nlohmann::json;

namespace {

json parse_json(std::string_view raw, const std::string& where) {
  try {
    return json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ValidationError(where, std::string("malformed JSON (") + e.what() + ")");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "missing required field");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw ValidationError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

long long require_int(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ValidationError(path + "." + key, "expected an integer");
  return v.get<long long>();
}

std::string line_path(const char* file, std::size_t line_no) {
  return std::string(file) + ":" + std::to_string(line_no);
}

}  // namespace

const Topic* TopicModelOutput::find(int topic_id) const {
  for (const auto& t : topics) {
    if (t.topic_id == topic_id) return &t;
  }
  return nullptr;
}

std::string TopicModelOutput::config_label() const {
  return model_name + "/" + dataset_name + "/K" + std::to_string(num_topics);
}

TopicModelOutput validate_topics(std::string_view raw_json) {
  const json doc = parse_json(raw_json, "topics.json");
  TopicModelOutput out;
  out.model_name = require_string(doc, "model", "$");
  out.dataset_name = require_string(doc, "dataset", "$");
  const long long k = require_int(doc, "num_topics", "$");
  if (k < 0) throw ValidationError("$.num_topics", "must be non-negative");
  out.num_topics = static_cast<int>(k);

  const auto& topics = require(doc, "topics", "$");
  if (!topics.is_array()) throw ValidationError("$.topics", "expected an array");
  if (static_cast<long long>(topics.size()) != k) {
    throw ValidationError("$.num_topics", "cardinality mismatch: num_topics=" + std::to_string(k) +
                                              " but " + std::to_string(topics.size()) +
                                              " topics listed");
  }

  std::unordered_set<int> seen_ids;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const std::string path = "$.topics[" + std::to_string(i) + "]";
    const auto& t = topics[i];
    Topic topic;
    const long long id = require_int(t, "id", path);
    if (id < 0) throw ValidationError(path + ".id", "topic id must be >= 0");
    topic.topic_id = static_cast<int>(id);
    if (!seen_ids.insert(topic.topic_id).second) {
      throw ValidationError(path + ".id", "duplicate topic id " + std::to_string(id));
    }

    const auto& words = require(t, "words", path);
    if (!words.is_array() || words.empty()) {
      throw ValidationError(path + ".words", "expected a non-empty array of strings");
    }
    std::unordered_set<std::string> folded;
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (!words[j].is_string()) {
        throw ValidationError(path + ".words[" + std::to_string(j) + "]", "expected a string");
      }
      auto w = words[j].get<std::string>();
      if (trim(w).empty()) {
        throw ValidationError(path + ".words[" + std::to_string(j) + "]", "empty word");
      }
      if (!folded.insert(fold_case(w)).second) {
        throw ValidationError(path + ".words", "duplicate word '" + w + "' in topic " +
                                                   std::to_string(topic.topic_id));
      }
      topic.words.push_back(std::move(w));
    }

    if (auto it = t.find("weights"); it != t.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != words.size()) {
        throw ValidationError(path + ".weights", "expected one number per word");
      }
      std::vector<double> weights;
      for (std::size_t j = 0; j < it->size(); ++j) {
        const auto& v = (*it)[j];
        if (!v.is_number()) {
          throw ValidationError(path + ".weights[" + std::to_string(j) + "]", "expected a number");
        }
        const double x = v.get<double>();
        if (!(x >= 0.0) || !std::isfinite(x)) {
          throw ValidationError(path + ".weights[" + std::to_string(j) + "]",
                                "weights must be finite and non-negative");
        }
        if (!weights.empty() && x > weights.back()) {
          throw ValidationError(path + ".weights", "weights must be non-increasing (topic " +
                                                       std::to_string(topic.topic_id) + ")");
        }
        weights.push_back(x);
      }
      topic.weights = std::move(weights);
    }
    out.topics.push_back(std::move(topic));
  }
  return out;
}

TopicModelOutput load_topics(const std::string& path) { return validate_topics(read_file(path)); }

json topics_to_json(const TopicModelOutput& model) {
  json topics = json::array();
  for (const auto& t : model.topics) {
    json jt = {{"id", t.topic_id}, {"words", t.words}};
    if (t.weights) jt["weights"] = *t.weights;
    topics.push_back(std::move(jt));
  }
  return json{{"model", model.model_name},
              {"dataset", model.dataset_name},
              {"num_topics", model.num_topics},
              {"topics", std::move(topics)}};
}

std::string serialize_topics(const TopicModelOutput& model) {
  return topics_to_json(model).dump(2) + "\n";
}

Corpus parse_corpus(std::string_view raw_jsonl) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  const auto lines = split_lines(raw_jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const std::string path = line_path("corpus.jsonl", n + 1);
    const json row = parse_json(lines[n], path);
    Document d;
    d.doc_id = require_string(row, "doc_id", path);
    d.text = require_string(row, "text", path);
    if (trim(d.text).empty()) throw ValidationError(path + ".text", "document text is empty");
    const auto split_name = require_string(row, "split", path);
    if (split_name == "train") {
      d.split = Split::kTrain;
    } else if (split_name == "test") {
      d.split = Split::kTest;
    } else {
      throw ValidationError(path + ".split", "expected \"train\" or \"test\", got \"" + split_name + "\"");
    }
    if (auto it = row.find("labels"); it != row.end() && !it->is_null()) {
      if (!it->is_array()) throw ValidationError(path + ".labels", "expected an array of strings");
      std::vector<std::string> labels;
      for (const auto& l : *it) {
        if (!l.is_string()) throw ValidationError(path + ".labels", "expected an array of strings");
        labels.push_back(l.get<std::string>());
      }
      d.labels = std::move(labels);
    }
    if (!ids.insert(d.doc_id).second) {
      throw ValidationError(path + ".doc_id", "duplicate doc_id '" + d.doc_id + "'");
    }
    corpus.push_back(std::move(d));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus) {
    json row = {{"doc_id", d.doc_id},
                {"text", d.text},
                {"split", d.split == Split::kTrain ? "train" : "test"}};
    if (d.labels) row["labels"] = *d.labels;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::unordered_map<std::string, std::size_t> index_corpus(const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> idx;
  idx.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) idx.emplace(corpus[i].doc_id, i);
  return idx;
}

std::vector<DocTopicAssignment> validate_assignments(std::string_view raw_jsonl,
                                                     const TopicModelOutput& model,
                                                     const Corpus& corpus) {
  const auto docs = index_corpus(corpus);
  std::unordered_set<std::string> seen_docs;
  std::vector<DocTopicAssignment> out;
  const auto lines = split_lines(raw_jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const std::string path = line_path("assignments.jsonl", n + 1);
    const json row = parse_json(lines[n], path);
    const auto doc_id = require_string(row, "doc_id", path);
    if (!docs.contains(doc_id)) {
      throw ValidationError(path + ".doc_id", "dangling doc_id '" + doc_id + "'");
    }
    if (!seen_docs.insert(doc_id).second) {
      throw ValidationError(path + ".doc_id", "doc_id '" + doc_id + "' listed twice");
    }
    const auto& entries = require(row, "topics", path);
    if (!entries.is_array() || entries.empty()) {
      throw ValidationError(path + ".topics", "expected a non-empty array");
    }
    int hard = 0;
    int soft = 0;
    double sum = 0.0;
    std::unordered_set<int> topic_ids;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const std::string epath = path + ".topics[" + std::to_string(j) + "]";
      const int topic_id = static_cast<int>(require_int(entries[j], "id", epath));
      if (!model.find(topic_id)) {
        throw ValidationError(epath + ".id", "dangling topic id " + std::to_string(topic_id) +
                                                 " (model has K=" +
                                                 std::to_string(model.num_topics) + ")");
      }
      if (!topic_ids.insert(topic_id).second) {
        throw ValidationError(epath + ".id", "topic id repeated within one document");
      }
      const auto& w = require(entries[j], "weight", epath);
      DocTopicAssignment a{doc_id, topic_id, std::nullopt};
      if (w.is_string() && w.get<std::string>() == "HARD") {
        ++hard;
      } else if (w.is_number()) {
        const double x = w.get<double>();
        if (!(x >= 0.0 && x <= 1.0)) {
          throw ValidationError(epath + ".weight", "weight must lie in [0,1]");
        }
        a.weight = x;
        sum += x;
        ++soft;
      } else {
        throw ValidationError(epath + ".weight", "expected a number or \"HARD\"");
      }
      out.push_back(std::move(a));
    }
    if (hard > 0 && (soft > 0 || hard > 1)) {
      throw ValidationError(path + ".topics",
                            "a HARD assignment must be the document's only entry");
    }
    if (soft > 0 && std::abs(sum - 1.0) > kAssignmentSumTolerance) {
      throw ValidationError(path + ".topics", "weights for doc '" + doc_id + "' sum to " +
                                                  std::to_string(sum) + ", expected 1");
    }
  }
  return out;
}

std::vector<DocTopicAssignment> load_assignments(const std::string& path,
                                                 const TopicModelOutput& model,
                                                 const Corpus& corpus) {
  return validate_assignments(read_file(path), model, corpus);
}

std::string serialize_assignments(const std::vector<DocTopicAssignment>& assignments) {
  std::string out;
  std::size_t i = 0;
  while (i < assignments.size()) {
    const auto& doc_id = assignments[i].doc_id;
    json entries = json::array();
    std::size_t j = i;
    for (; j < assignments.size() && assignments[j].doc_id == doc_id; ++j) {
      const auto& a = assignments[j];
      entries.push_back({{"id", a.topic_id},
                         {"weight", a.weight ? json(*a.weight) : json("HARD")}});
    }
    out += json{{"doc_id", doc_id}, {"topics", std::move(entries)}}.dump();
    out += '\n';
    i = j;
  }
  return out;
}

ExportMetadata parse_export_metadata(std::string_view raw_json) {
  const json doc = parse_json(raw_json, "export.json");
  ExportMetadata m;
  m.toolkit = require_string(doc, "toolkit", "export");
  m.toolkit_version = require_string(doc, "toolkit_version", "export");
  const auto k = require_int(doc, "k", "export");
  const auto words = require_int(doc, "m", "export");
  if (k < 1) throw ValidationError("export.k", "must be positive");
  if (words < 1) throw ValidationError("export.m", "must be positive");
  if (m.toolkit.empty()) throw ValidationError("export.toolkit", "must not be empty");
  m.k = static_cast<int>(k);
  m.m = static_cast<int>(words);
  return m;
}

json to_json(const ExportMetadata& meta) {
  return {{"toolkit", meta.toolkit}, {"toolkit_version", meta.toolkit_version}, {"k", meta.k}, {"m", meta.m}};
}

ExportBundle validate_export_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  auto file = [&](const char* name) {
    const auto p = fs::path(dir) / name;
    if (!fs::exists(p)) throw ValidationError(name, "missing from export bundle " + dir);
    return read_file(p.string());
  };
  ExportBundle b;
  b.meta = parse_export_metadata(file("export.json"));
  b.topics = validate_topics(file("topics.json"));
  if (b.topics.num_topics != b.meta.k) {
    throw ValidationError("$.num_topics", "is " + std::to_string(b.topics.num_topics) +
                                                   " but export.json says k=" + std::to_string(b.meta.k));
  }
  for (std::size_t i = 0; i < b.topics.topics.size(); ++i) {
    if (static_cast<int>(b.topics.topics[i].words.size()) != b.meta.m) {
      throw ValidationError("$.topics[" + std::to_string(i) + "].words",
                            "has " + std::to_string(b.topics.topics[i].words.size()) + " words, expected m=" +
                                std::to_string(b.meta.m));
    }
  }
  b.corpus = parse_corpus(file("corpus.jsonl"));
  b.assignments = validate_assignments(file("assignments.jsonl"), b.topics, b.corpus);
  return b;
}

}  // namespace topiceval
