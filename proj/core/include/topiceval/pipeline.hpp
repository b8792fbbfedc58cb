#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiceval/adversarial.hpp"
#include "topiceval/analysis.hpp"
#include "topiceval/baseline.hpp"
#include "topiceval/corpus_prep.hpp"
#include "topiceval/gateway.hpp"
#include "topiceval/llm_metrics.hpp"

namespace topiceval {

// Malformed or inconsistent run configuration (as opposed to bad data).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TopicSetPaths {
  std::string topics;
  std::optional<std::string> assignments;
};

struct AdversarialSettings {
  std::vector<AdvTest> tests{AdvTest::kNonword, AdvTest::kOutlier, AdvTest::kDuplicate};
  std::size_t n = 100;
  std::optional<std::string> lexicon;
};

struct RunConfig {
  std::string run_id = "run";
  std::string out_dir = "artifacts";
  std::string cache_dir = "cache";
  std::string corpus;
  PrepConfig prep;
  std::vector<TopicSetPaths> topic_sets;
  std::vector<LlmConfig> llms;
  std::vector<MetricId> metrics{kJudgeMetrics.begin(), kJudgeMetrics.end()};
  BaselineParams baseline;
  PairStrategy pairs;
  std::size_t per_topic_docs = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  bool missing_theme_union = false;
  AdversarialSettings adversarial;
  CorrMethod method = CorrMethod::kPearson;
  ObservationUnit unit = ObservationUnit::kConfig;
  std::optional<std::string> prompts_dir;
  nlohmann::json snapshot;  // the config as read, for the manifest
};

// Relative paths inside the file are resolved against its directory. LLM
// entries may be inline objects or paths to LLM config files.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir);

std::vector<MetricId> parse_metric_list(std::string_view csv);
std::vector<BaselineMetric> parse_baseline_metric_list(std::string_view csv);

struct PrepResult {
  std::vector<TokenList> docs;  // tokenized, not vocabulary-filtered
  VocabSpec vocab;
  CorpusStats stats;
};

PrepResult prepare_corpus(const Corpus& corpus, const PrepConfig& cfg, Diagnostics* diag = nullptr);
// corpus.prepped.jsonl ({"doc_id","tokens"}), vocab.txt and stats.json.
void write_prep_outputs(const PrepResult& prep, const Corpus& corpus, const std::string& dir);
std::vector<TokenList> load_prepped_tokens(const std::string& path);

// judgments.jsonl, scores.csv, flagged.jsonl and pairs.jsonl in `dir`.
void write_judge_outputs(const JudgeRun& run, const std::string& dir);

// "a b/c" -> "a_b_c": safe as a single path component.
std::string path_component(std::string_view text);

enum class Stage { kPrep, kBaseline, kJudge, kAdversarial, kAnalyze, kReport };
inline constexpr std::array<Stage, 6> kAllStages = {Stage::kPrep,        Stage::kBaseline, Stage::kJudge,
                                                   Stage::kAdversarial, Stage::kAnalyze,  Stage::kReport};
std::string_view to_string(Stage s);

struct StageRecord {
  bool complete = false;
  std::string input_hash;
};

struct RunManifest {
  std::string run_id;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::map<std::string, StageRecord> stages;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

using BackendFactory = std::function<std::shared_ptr<ChatBackend>(const LlmConfig&)>;

// Runs the stages of one configuration, skipping any stage whose recorded
// input hash is unchanged (unless forced). The manifest is rewritten after
// every stage so an interrupted run resumes where it stopped.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, bool force = false, Diagnostics* diag = nullptr);

  void set_backend_factory(BackendFactory factory) { factory_ = std::move(factory); }

  // Returns true when the stage actually ran.
  bool run_stage(Stage stage);
  void run_all();

  const RunManifest& manifest() const noexcept { return manifest_; }
  const RunConfig& config() const noexcept { return cfg_; }
  std::string out_path(const std::string& relative) const;
  // Per-judge gateway counters accumulated over the stages run so far.
  const std::map<std::string, GatewayStats>& gateway_stats() const noexcept { return stats_; }

 private:
  std::string stage_hash(Stage stage) const;
  void save_manifest() const;
  void do_prep();
  void do_baseline();
  void do_judge();
  void do_adversarial();
  void do_analyze();
  void do_report();
  void write_combined_judgments() const;
  Gateway make_gateway(const LlmConfig& llm);
  void add_stats(const std::string& llm_id, const GatewayStats& s);

  RunConfig cfg_;
  bool force_;
  Diagnostics* diag_;
  BackendFactory factory_;
  RunManifest manifest_;
  std::shared_ptr<ResponseCache> cache_;
  PromptLibrary prompts_;
  std::map<std::string, GatewayStats> stats_;
};

// All files matching `name` below `dir`, sorted.
std::vector<std::string> find_files(const std::string& dir, const std::string& name);

}  // namespace topiceval
