#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gecforge::llm {

/// In-context example: rendered as a user turn followed by an assistant turn.
struct Demonstration {
  std::string input;
  std::string output;

  friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

struct LlmRequest {
  std::string model;
  std::string system_prompt;
  std::string user_prompt;
  std::vector<Demonstration> demonstrations;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;

  friend bool operator==(const LlmRequest&, const LlmRequest&) = default;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;

  friend bool operator==(const Usage&, const Usage&) = default;
};

struct LlmResponse {
  std::string text;  // verbatim provider output
  std::string model;
  Usage usage;
  bool cached = false;
};

/// SHA-256 over the canonical JSON of the keyed request fields: model, both
/// prompts, demonstrations, temperature and seed.
struct CacheKey {
  std::string digest;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// Throws ConfigError when the model or either prompt is empty, or the
/// temperature is negative.
void validate_request(const LlmRequest& request);

nlohmann::ordered_json keyed_fields(const LlmRequest& request);
CacheKey cache_key(const LlmRequest& request);

/// OpenAI-style message list: system, demonstrations in order, live prompt.
nlohmann::ordered_json chat_messages(const LlmRequest& request);

nlohmann::ordered_json to_json(const LlmRequest& request);
LlmRequest request_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const LlmResponse& response);
LlmResponse response_from_json(const nlohmann::json& j);

}  // namespace gecforge::llm
