#include "gecforge/llm/request.hpp"

#include "gecforge/errors.hpp"
#include "gecforge/text.hpp"

namespace gecforge::llm {

using ordered_json = nlohmann::ordered_json;

void validate_request(const LlmRequest& r) {
  if (r.model.empty()) throw ConfigError("LLM request has no model");
  if (r.system_prompt.empty() || r.user_prompt.empty()) throw ConfigError("LLM request prompts must be nonempty");
  if (!(r.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
}

ordered_json keyed_fields(const LlmRequest& r) {
  ordered_json j;
  j["model"] = r.model;
  j["system_prompt"] = r.system_prompt;
  j["user_prompt"] = r.user_prompt;
  j["demonstrations"] = ordered_json::array();
  for (const auto& d : r.demonstrations) {
    j["demonstrations"].push_back(ordered_json{{"input", d.input}, {"output", d.output}});
  }
  j["temperature"] = r.temperature;
  j["seed"] = r.seed ? ordered_json(*r.seed) : ordered_json(nullptr);
  return j;
}

CacheKey cache_key(const LlmRequest& r) { return CacheKey{sha256_hex(keyed_fields(r).dump())}; }

ordered_json chat_messages(const LlmRequest& r) {
  ordered_json messages = ordered_json::array();
  messages.push_back({{"role", "system"}, {"content", r.system_prompt}});
  for (const auto& d : r.demonstrations) {
    messages.push_back({{"role", "user"}, {"content", d.input}});
    messages.push_back({{"role", "assistant"}, {"content", d.output}});
  }
  messages.push_back({{"role", "user"}, {"content", r.user_prompt}});
  return messages;
}

ordered_json to_json(const LlmRequest& r) {
  ordered_json j = keyed_fields(r);
  j["max_tokens"] = r.max_tokens;
  return j;
}

LlmRequest request_from_json(const nlohmann::json& j) {
  LlmRequest r;
  r.model = j.at("model").get<std::string>();
  r.system_prompt = j.at("system_prompt").get<std::string>();
  r.user_prompt = j.at("user_prompt").get<std::string>();
  for (const auto& d : j.at("demonstrations")) {
    r.demonstrations.push_back({d.at("input").get<std::string>(), d.at("output").get<std::string>()});
  }
  r.temperature = j.at("temperature").get<double>();
  if (j.contains("max_tokens")) r.max_tokens = j.at("max_tokens").get<int>();
  if (const auto s = j.find("seed"); s != j.end() && !s->is_null()) r.seed = s->get<std::int64_t>();
  return r;
}

ordered_json to_json(const LlmResponse& r) {
  ordered_json j;
  j["text"] = r.text;
  j["model"] = r.model;
  j["usage"] = {{"prompt_tokens", r.usage.prompt_tokens},
                {"completion_tokens", r.usage.completion_tokens},
                {"total_tokens", r.usage.total_tokens}};
  return j;
}

LlmResponse response_from_json(const nlohmann::json& j) {
  LlmResponse r;
  r.text = j.at("text").get<std::string>();
  r.model = j.value("model", std::string());
  if (const auto u = j.find("usage"); u != j.end() && u->is_object()) {
    r.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
    r.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    r.usage.total_tokens = u->value("total_tokens", std::int64_t{0});
  }
  return r;
}

}  // namespace gecforge::llm
