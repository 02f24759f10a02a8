#include "gecforge/llm/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

#include "gecforge/errors.hpp"

namespace gecforge::llm {

OpenAiChatBackend::OpenAiChatBackend(Config config) : config_(std::move(config)) {
  if (config_.api_key.empty()) throw ConfigError("live-api backend needs GECFORGE_API_KEY");
  std::string base = config_.api_base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const auto scheme_end = base.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("API base is not a URL: " + config_.api_base);
  const std::string scheme = base.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("API base must be http or https: " + config_.api_base);
  const auto path_start = base.find('/', scheme_end + 3);
  origin_ = base.substr(0, path_start);
  path_ = (path_start == std::string::npos ? std::string() : base.substr(path_start)) + "/chat/completions";
}

OpenAiChatBackend::Config OpenAiChatBackend::config_from_env() {
  Config c;
  if (const char* base = std::getenv("GECFORGE_API_BASE"); base && *base) c.api_base = base;
  if (const char* key = std::getenv("GECFORGE_API_KEY")) c.api_key = key;
  return c;
}

nlohmann::ordered_json OpenAiChatBackend::request_body(const LlmRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  body["messages"] = chat_messages(request);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

LlmResponse OpenAiChatBackend::parse_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw TransportError("provider returned a non-JSON body");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw TransportError("provider response has no choices");
  }
  const auto& choice = (*choices)[0];
  if (choice.value("finish_reason", std::string()) == "content_filter") throw RefusalError(body);
  const auto message = choice.find("message");
  if (message == choice.end() || !message->is_object()) throw TransportError("provider response has no message");
  if (const auto refusal = message->find("refusal"); refusal != message->end() && !refusal->is_null()) {
    throw RefusalError(body);
  }
  const auto content = message->find("content");
  if (content == message->end() || !content->is_string()) throw RefusalError(body);

  LlmResponse out;
  out.text = content->get<std::string>();
  out.model = j.value("model", std::string());
  if (const auto u = j.find("usage"); u != j.end() && u->is_object()) {
    out.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
    out.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    out.usage.total_tokens = u->value("total_tokens", std::int64_t{0});
  }
  return out;
}

LlmResponse OpenAiChatBackend::send(const LlmRequest& request) {
  httplib::Client cli(origin_);
  const auto timeout = static_cast<time_t>(config_.timeout.count());
  cli.set_connection_timeout(timeout, 0);
  cli.set_read_timeout(timeout, 0);
  cli.set_write_timeout(timeout, 0);
  cli.set_bearer_token_auth(config_.api_key);

  const auto res = cli.Post(path_, request_body(request).dump(), "application/json");
  if (!res) throw TransientError("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500) {
    throw TransientError("provider returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  }
  return parse_response(res->body);
}

}  // namespace gecforge::llm
