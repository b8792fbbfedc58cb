#include "topiceval/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "topiceval/interchange.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace {

template <typename T>
T get_key(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("$.") + key, "wrong type");
  }
}

}  // namespace

void LlmConfig::validate() const {
  if (llm_id.empty()) throw ValidationError("$.llm_id", "must be non-empty");
  if (endpoint_url.empty()) throw ValidationError("$.endpoint_url", "must be non-empty");
  if (model_identifier.empty()) throw ValidationError("$.model_identifier", "must be non-empty");
  if (!(temperature >= 0.0)) throw ValidationError("$.temperature", "must be >= 0");
  if (n_samples < 1 || n_samples % 2 == 0) throw ValidationError("$.n_samples", "must be a positive odd number");
  if (max_retries < 0) throw ValidationError("$.max_retries", "must be >= 0");
  if (!(request_timeout > 0.0)) throw ValidationError("$.request_timeout", "must be > 0");
  if (max_in_flight < 1) throw ValidationError("$.max_in_flight", "must be >= 1");
  if (requests_per_minute < 0.0) throw ValidationError("$.requests_per_minute", "must be >= 0");
  if (max_tokens < 1) throw ValidationError("$.max_tokens", "must be >= 1");
  if (max_redraws < 0) throw ValidationError("$.max_redraws", "must be >= 0");
  if (backoff_initial_ms < 0 || backoff_max_ms < backoff_initial_ms) {
    throw ValidationError("$.backoff_initial_ms", "need 0 <= backoff_initial_ms <= backoff_max_ms");
  }
  if (llm_id.find_first_of("/\\") != std::string::npos || llm_id == "." || llm_id == "..") {
    throw ValidationError("$.llm_id", "must be usable as a directory name");
  }
}

LlmConfig llm_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("$", "llm config must be a JSON object");
  static const std::set<std::string> known = {
      "llm_id",      "endpoint_url",        "model_identifier", "temperature",        "n_samples",
      "max_retries", "request_timeout",     "max_in_flight",    "requests_per_minute", "max_tokens",
      "max_redraws", "backoff_initial_ms", "backoff_max_ms"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ValidationError("$." + key, "unknown key");
  }
  LlmConfig cfg;
  cfg.llm_id = get_key<std::string>(j, "llm_id", "");
  cfg.endpoint_url = get_key<std::string>(j, "endpoint_url", "");
  cfg.model_identifier = get_key<std::string>(j, "model_identifier", cfg.llm_id);
  cfg.temperature = get_key(j, "temperature", cfg.temperature);
  cfg.n_samples = get_key(j, "n_samples", cfg.n_samples);
  cfg.max_retries = get_key(j, "max_retries", cfg.max_retries);
  cfg.request_timeout = get_key(j, "request_timeout", cfg.request_timeout);
  cfg.max_in_flight = get_key(j, "max_in_flight", cfg.max_in_flight);
  cfg.requests_per_minute = get_key(j, "requests_per_minute", cfg.requests_per_minute);
  cfg.max_tokens = get_key(j, "max_tokens", cfg.max_tokens);
  cfg.max_redraws = get_key(j, "max_redraws", cfg.max_redraws);
  cfg.backoff_initial_ms = get_key(j, "backoff_initial_ms", cfg.backoff_initial_ms);
  cfg.backoff_max_ms = get_key(j, "backoff_max_ms", cfg.backoff_max_ms);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const LlmConfig& cfg) {
  return {{"llm_id", cfg.llm_id},
          {"endpoint_url", cfg.endpoint_url},
          {"model_identifier", cfg.model_identifier},
          {"temperature", cfg.temperature},
          {"n_samples", cfg.n_samples},
          {"max_retries", cfg.max_retries},
          {"request_timeout", cfg.request_timeout},
          {"max_in_flight", cfg.max_in_flight},
          {"requests_per_minute", cfg.requests_per_minute},
          {"max_tokens", cfg.max_tokens},
          {"max_redraws", cfg.max_redraws},
          {"backoff_initial_ms", cfg.backoff_initial_ms},
          {"backoff_max_ms", cfg.backoff_max_ms}};
}

LlmConfig load_llm_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path, std::string("invalid JSON: ") + e.what());
  }
  return llm_config_from_json(j);
}

std::shared_ptr<ChatBackend> make_backend(const LlmConfig& cfg) {
  const auto& url = cfg.endpoint_url;
  if (url.starts_with("mock://scripted")) {
    std::uint64_t seed = 0;
    double garbage = 0.06;
    const auto q = url.find('?');
    if (q != std::string::npos) {
      for (const auto& kv : split(url.substr(q + 1), '&')) {
        const auto eq = kv.find('=');
        const auto key = kv.substr(0, eq);
        const auto value = eq == std::string::npos ? std::string() : kv.substr(eq + 1);
        try {
          if (key == "seed") {
            seed = std::stoull(value);
          } else if (key == "garbage") {
            garbage = std::stod(value);
          } else {
            throw ValidationError("$.endpoint_url", "unknown mock parameter '" + key + "'");
          }
        } catch (const std::logic_error&) {
          throw ValidationError("$.endpoint_url", "bad mock parameter '" + kv + "'");
        }
      }
    }
    return std::make_shared<ScriptedJudge>(seed, garbage);
  }
  if (url.starts_with("http://") || url.starts_with("https://")) {
    return std::make_shared<HttpChatBackend>(url, cfg.request_timeout);
  }
  throw ValidationError("$.endpoint_url", "unsupported scheme in '" + url + "'");
}

ResponseCache::ResponseCache(std::string dir) : dir_(std::move(dir)) {}

std::string ResponseCache::shard_path(const std::string& llm_id, MetricId metric) const {
  return (std::filesystem::path(dir_) / llm_id / (std::string(to_string(metric)) + ".jsonl")).string();
}

ResponseCache::Shard& ResponseCache::shard(const std::string& llm_id, MetricId metric) {
  auto& s = shards_[{llm_id, metric}];
  if (s.loaded) return s;
  s.loaded = true;
  const auto path = shard_path(llm_id, metric);
  if (!std::filesystem::exists(path)) return s;
  for (const auto& line : split_lines(read_file(path))) {
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      s.entries[{from_hex64(j.at("prompt_hash").get<std::string>()), j.at("sample_index").get<int>()}] =
          j.at("text").get<std::string>();
    } catch (const std::exception&) {
      // A torn final line from an interrupted run; the sample is simply re-fetched.
    }
  }
  return s;
}

std::optional<std::string> ResponseCache::get(const std::string& llm_id, MetricId metric,
                                              std::uint64_t prompt_hash, int sample_index) {
  std::lock_guard lock(mu_);
  auto& s = shard(llm_id, metric);
  auto it = s.entries.find({prompt_hash, sample_index});
  if (it == s.entries.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& llm_id, MetricId metric, std::uint64_t prompt_hash, int sample_index,
                        const std::string& text) {
  std::lock_guard lock(mu_);
  auto& s = shard(llm_id, metric);
  if (!s.entries.emplace(std::make_pair(prompt_hash, sample_index), text).second) return;
  const auto path = shard_path(llm_id, metric);
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  nlohmann::json j = {{"prompt_hash", to_hex64(prompt_hash)}, {"sample_index", sample_index}, {"text", text}};
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("cannot append to cache shard " + path);
}

Gateway::Gateway(LlmConfig cfg, std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache,
                 Diagnostics* diag)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      diag_(diag),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      last_refill_(std::chrono::steady_clock::now()) {
  cfg_.validate();
  tokens_ = std::max(1.0, cfg_.requests_per_minute / 60.0);
}

std::uint64_t Gateway::hash(const RenderedPrompt& prompt) const {
  return prompt_hash(prompt.template_id, prompt.text, cfg_.model_identifier, cfg_.temperature);
}

void Gateway::acquire_slot() {
  std::unique_lock lock(slot_mu_);
  slot_cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
  ++in_flight_;
}

void Gateway::release_slot() {
  {
    std::lock_guard lock(slot_mu_);
    --in_flight_;
  }
  slot_cv_.notify_one();
}

// Token bucket that may go into debt: a caller takes its token immediately
// and then sleeps off any deficit.
void Gateway::throttle() {
  if (cfg_.requests_per_minute <= 0.0) return;
  const double rate = cfg_.requests_per_minute / 60.0;  // tokens per second
  const double capacity = std::max(1.0, rate);
  double wait_s = 0.0;
  {
    std::lock_guard lock(bucket_mu_);
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    last_refill_ = now;
    tokens_ = std::min(capacity, tokens_ + elapsed * rate);
    tokens_ -= 1.0;
    if (tokens_ < 0.0) wait_s = -tokens_ / rate;
  }
  if (wait_s > 0.0) sleep_(std::chrono::milliseconds(static_cast<long long>(std::ceil(wait_s * 1000.0))));
}

std::optional<std::string> Gateway::fetch(const RenderedPrompt& prompt, int sample_index) {
  const auto h = hash(prompt);
  if (cache_) {
    if (auto hit = cache_->get(cfg_.llm_id, prompt.template_id, h, sample_index)) {
      ++cache_hits_;
      return hit;
    }
  }
  ChatRequest req{cfg_.model_identifier, prompt.text, cfg_.temperature, cfg_.max_tokens, sample_index};
  const std::string where = std::string(to_string(prompt.template_id)) + " " + to_hex64(h) + "#" +
                            std::to_string(sample_index);
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      ++retries_;
      const long long backoff = std::min<long long>(
          cfg_.backoff_max_ms, static_cast<long long>(cfg_.backoff_initial_ms) << std::min(attempt - 1, 20));
      warn(diag_, cfg_.llm_id + ": retry " + std::to_string(attempt) + "/" + std::to_string(cfg_.max_retries) +
                      " for " + where + " after " + last_error);
      sleep_(std::chrono::milliseconds(backoff));
    }
    throttle();
    acquire_slot();
    ChatResponse resp;
    try {
      resp = backend_->complete(req);
    } catch (const std::exception& e) {
      resp = {0, "", e.what()};
    }
    release_slot();
    ++network_calls_;
    if (resp.status == 200) {
      if (cache_) cache_->put(cfg_.llm_id, prompt.template_id, h, sample_index, resp.text);
      return resp.text;
    }
    last_error = resp.status == 0 ? "transport error: " + resp.error
                                  : "HTTP " + std::to_string(resp.status) + (resp.error.empty() ? "" : ": " + resp.error);
    if (resp.status != 0 && resp.status != 429 && resp.status < 500) {
      throw EndpointError(resp.status, cfg_.llm_id + ": " + last_error);
    }
  }
  ++failed_samples_;
  warn(diag_, cfg_.llm_id + ": giving up on " + where + " (" + last_error + ")");
  return std::nullopt;
}

SampledJudgment Gateway::judge(const RenderedPrompt& prompt, const TargetRef& target, const PayloadParser& parse) {
  SampledJudgment out;
  const auto h = hash(prompt);
  auto draw = [&](int index) {
    JudgmentRecord r;
    r.metric_id = prompt.template_id;
    r.target = target;
    r.llm_id = cfg_.llm_id;
    r.sample_index = index;
    r.prompt_hash = h;
    if (auto text = fetch(prompt, index)) {
      r.raw_text = std::move(*text);
      r.parsed = parse(r.raw_text);
    }
    out.records.push_back(std::move(r));
    return out.records.back().valid();
  };
  int invalid = 0;
  for (int i = 0; i < cfg_.n_samples; ++i) {
    if (!draw(i)) ++invalid;
  }
  for (int extra = 0; invalid > 0 && extra < cfg_.max_redraws; ++extra) {
    ++redraws_;
    if (draw(cfg_.n_samples + extra)) --invalid;
  }
  for (const auto& r : out.records) {
    if (r.valid()) out.valid_payloads.push_back(*r.parsed);
  }
  out.n_valid = static_cast<int>(out.valid_payloads.size());
  out.failed = out.n_valid < majority_threshold(cfg_.n_samples);
  return out;
}

GatewayStats Gateway::stats() const {
  return {network_calls_.load(), cache_hits_.load(), retries_.load(), failed_samples_.load(), redraws_.load()};
}

}  // namespace topiceval
