#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "topiceval/gateway.hpp"
#include "topiceval/interchange.hpp"

namespace topiceval {

HttpChatBackend::HttpChatBackend(std::string endpoint_url, double timeout_seconds) : timeout_(timeout_seconds) {
  const auto scheme_end = endpoint_url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("$.endpoint_url", "missing scheme");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (endpoint_url.starts_with("https://")) {
    throw ValidationError("$.endpoint_url", "https endpoints need a build with OpenSSL");
  }
#endif
  const auto path_start = endpoint_url.find('/', scheme_end + 3);
  base_ = endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint_url.substr(path_start);
  if (const char* key = std::getenv("LLM_API_KEY")) api_key_ = key;
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(timeout_);
  const auto usecs = static_cast<time_t>((timeout_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);

  const nlohmann::json body = {{"model", request.model},
                               {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
                               {"temperature", request.temperature},
                               {"max_tokens", request.max_tokens}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) return {0, "", httplib::to_string(res.error())};
  if (res->status != 200) return {res->status, "", res->body.substr(0, 200)};
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return {200, content.is_null() ? std::string() : content.get<std::string>(), ""};
  } catch (const std::exception& e) {
    // A 200 with an unusable body is treated like a dropped connection.
    return {0, "", std::string("malformed completion body: ") + e.what()};
  }
}

}  // namespace topiceval
