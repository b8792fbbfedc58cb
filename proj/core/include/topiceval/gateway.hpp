#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiceval/diagnostics.hpp"
#include "topiceval/judgment.hpp"
#include "topiceval/prompts.hpp"

namespace topiceval {

struct LlmConfig {
  std::string llm_id;
  std::string endpoint_url;  // http(s)://... or mock://scripted?seed=N
  std::string model_identifier;
  double temperature = 0.7;
  int n_samples = 5;
  int max_retries = 3;
  double request_timeout = 60.0;  // seconds
  int max_in_flight = 4;
  double requests_per_minute = 0.0;  // 0 disables the limiter
  int max_tokens = 512;
  int max_redraws = 2;
  int backoff_initial_ms = 500;
  int backoff_max_ms = 30000;

  // Throws ValidationError naming the offending key.
  void validate() const;
};

LlmConfig llm_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LlmConfig& cfg);
LlmConfig load_llm_config(const std::string& path);

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.7;
  int max_tokens = 512;
  int sample_index = 0;
};

// status 200 carries `text`; 0 means the transport failed before a status
// line arrived. 429 and 5xx are retried, any other non-200 aborts the run.
struct ChatResponse {
  int status = 200;
  std::string text;
  std::string error;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// OpenAI-style chat-completions client. The prompt goes out as one user
// message; the bearer token is read from LLM_API_KEY when set.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend(std::string endpoint_url, double timeout_seconds);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::string base_;
  std::string path_;
  double timeout_;
  std::string api_key_;
};

// Offline stand-in for a judge. Answers are plausible for each template,
// vary with sample_index, and are a pure function of (seed, prompt,
// sample_index). A small share of answers is deliberately unparseable.
class ScriptedJudge : public ChatBackend {
 public:
  explicit ScriptedJudge(std::uint64_t seed, double garbage_rate = 0.06);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::uint64_t seed_;
  double garbage_rate_;
  PromptLibrary library_;
};

// Builds the backend named by cfg.endpoint_url.
std::shared_ptr<ChatBackend> make_backend(const LlmConfig& cfg);

// Authentication failures and other non-retryable HTTP errors.
class EndpointError : public std::runtime_error {
 public:
  EndpointError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// Successful raw responses, one JSONL shard per (llm_id, metric):
// <dir>/<llm_id>/<metric>.jsonl with {"prompt_hash","sample_index","text"}.
class ResponseCache {
 public:
  explicit ResponseCache(std::string dir);

  std::optional<std::string> get(const std::string& llm_id, MetricId metric, std::uint64_t prompt_hash,
                                 int sample_index);
  void put(const std::string& llm_id, MetricId metric, std::uint64_t prompt_hash, int sample_index,
           const std::string& text);

 private:
  struct Shard {
    bool loaded = false;
    std::map<std::pair<std::uint64_t, int>, std::string> entries;
  };
  Shard& shard(const std::string& llm_id, MetricId metric);
  std::string shard_path(const std::string& llm_id, MetricId metric) const;

  std::string dir_;
  std::mutex mu_;
  std::map<std::pair<std::string, MetricId>, Shard> shards_;
};

struct GatewayStats {
  std::size_t network_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::size_t failed_samples = 0;
  std::size_t redraws = 0;
};

using PayloadParser = std::function<std::optional<Payload>(const std::string& raw)>;

// All records produced for one prompt (including failed samples and
// redraws), sorted by sample_index, plus the valid payloads in that order.
struct SampledJudgment {
  std::vector<JudgmentRecord> records;
  std::vector<Payload> valid_payloads;
  int n_valid = 0;
  bool failed = false;  // fewer than a majority of n_samples valid
};

class Gateway {
 public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  Gateway(LlmConfig cfg, std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache = nullptr,
          Diagnostics* diag = nullptr);

  const LlmConfig& config() const noexcept { return cfg_; }
  void set_sleep(SleepFn sleep) { sleep_ = std::move(sleep); }

  // One sample: cache, then the backend with retries. nullopt when retries
  // are exhausted. Throws EndpointError on non-retryable statuses.
  std::optional<std::string> fetch(const RenderedPrompt& prompt, int sample_index);

  // n_samples draws, parsed; invalid samples are redrawn (sample_index >= n_samples)
  // up to max_redraws times.
  SampledJudgment judge(const RenderedPrompt& prompt, const TargetRef& target, const PayloadParser& parse);

  std::uint64_t hash(const RenderedPrompt& prompt) const;
  GatewayStats stats() const;

 private:
  void acquire_slot();
  void release_slot();
  void throttle();

  LlmConfig cfg_;
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  Diagnostics* diag_;
  SleepFn sleep_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  int in_flight_ = 0;

  std::mutex bucket_mu_;
  double tokens_ = 0.0;
  std::chrono::steady_clock::time_point last_refill_;

  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> failed_samples_{0};
  std::atomic<std::size_t> redraws_{0};
};

// Smallest number of votes that is a strict majority of n.
constexpr int majority_threshold(int n) { return n / 2 + 1; }

}  // namespace topiceval
