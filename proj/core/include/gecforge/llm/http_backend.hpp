#pragma once

#include <chrono>
#include <string>

#include "gecforge/llm/client.hpp"

namespace gecforge::llm {

/// OpenAI-compatible `POST <api_base>/chat/completions`.
class OpenAiChatBackend : public Backend {
 public:
  struct Config {
    std::string api_base = "https://api.openai.com/v1";
    std::string api_key;
    std::chrono::seconds timeout{120};
  };

  /// Throws ConfigError when `api_key` is empty or `api_base` is not an http(s) URL.
  explicit OpenAiChatBackend(Config config);

  /// Reads GECFORGE_API_BASE (optional) and GECFORGE_API_KEY.
  static Config config_from_env();

  /// Connection failures, 429 and 5xx raise TransientError; other non-2xx
  /// statuses raise TransportError; a content-filter stop or an explicit
  /// refusal raises RefusalError with the raw body.
  LlmResponse send(const LlmRequest& request) override;

  /// JSON body posted for `request`.
  static nlohmann::ordered_json request_body(const LlmRequest& request);

  /// Decodes a 2xx response body.
  static LlmResponse parse_response(const std::string& body);

 private:
  Config config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // path prefix + /chat/completions
};

}  // namespace gecforge::llm
