#include "gecforge/llm/client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "gecforge/corpus.hpp"
#include "gecforge/errors.hpp"

namespace gecforge::llm {

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "live-api" || name == "live") return BackendKind::LiveApi;
  if (name == "replay-cache" || name == "replay") return BackendKind::ReplayCache;
  if (name == "scripted-mock" || name == "mock") return BackendKind::ScriptedMock;
  throw ConfigError("unknown backend '" + std::string(name) + "' (expected live-api, replay-cache or scripted-mock)");
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::LiveApi:
      return "live-api";
    case BackendKind::ReplayCache:
      return "replay-cache";
    case BackendKind::ScriptedMock:
      return "scripted-mock";
  }
  return "?";
}

// Scripted mock ---------------------------------------------------------------------

namespace {

ScriptedMockBackend::Reply parse_reply(const nlohmann::json& j) {
  using Kind = ScriptedMockBackend::Reply::Kind;
  if (j.is_string()) return {Kind::Text, j.get<std::string>()};
  if (!j.is_object() || !j.contains("error")) throw ConfigError("mock reply must be a string or an error object");
  const std::string err = j.at("error").get<std::string>();
  const std::string body = j.value("body", std::string("scripted failure"));
  if (err == "transient") return {Kind::Transient, body};
  if (err == "transport") return {Kind::Transport, body};
  if (err == "refusal") return {Kind::Refusal, body};
  throw ConfigError("unknown mock error kind '" + err + "'");
}

}  // namespace

ScriptedMockBackend::ScriptedMockBackend(std::vector<std::string> sequential) {
  for (auto& s : sequential) sequential_.push_back({Reply::Kind::Text, std::move(s)});
}

std::shared_ptr<ScriptedMockBackend> ScriptedMockBackend::from_json(const nlohmann::json& script) {
  if (!script.is_array()) throw ConfigError("mock script must be a JSON array");
  std::shared_ptr<ScriptedMockBackend> mock(new ScriptedMockBackend());
  try {
    for (const auto& item : script) {
      if (item.is_object() && item.contains("when")) {
        Rule rule{item.at("when").get<std::string>(), {}, 0};
        for (const auto& r : item.at("replies")) rule.replies.push_back(parse_reply(r));
        if (rule.replies.empty()) throw ConfigError("mock rule '" + rule.when + "' has no replies");
        mock->rules_.push_back(std::move(rule));
      } else {
        mock->sequential_.push_back(parse_reply(item));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed mock script: ") + e.what());
  }
  return mock;
}

std::shared_ptr<ScriptedMockBackend> ScriptedMockBackend::from_file(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(corpus::read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("mock script " + path.string() + " is not valid JSON");
  return from_json(j);
}

const ScriptedMockBackend::Reply& ScriptedMockBackend::take(std::vector<Reply>& replies, std::size_t& next) {
  const Reply& r = replies[std::min(next, replies.size() - 1)];
  if (next < replies.size()) ++next;
  return r;
}

LlmResponse ScriptedMockBackend::send(const LlmRequest& request) {
  ++calls_;
  Reply reply;
  {
    std::lock_guard lock(mutex_);
    const auto rule = std::find_if(rules_.begin(), rules_.end(), [&](const Rule& r) {
      return request.user_prompt.find(r.when) != std::string::npos;
    });
    if (rule != rules_.end()) {
      reply = take(rule->replies, rule->next);
    } else if (!sequential_.empty()) {
      reply = take(sequential_, next_);
    } else {
      throw TransportError("mock script has no reply for this request");
    }
  }
  switch (reply.kind) {
    case Reply::Kind::Transient:
      throw TransientError(reply.body);
    case Reply::Kind::Transport:
      throw TransportError(reply.body);
    case Reply::Kind::Refusal:
      throw RefusalError(reply.body);
    case Reply::Kind::Text:
      break;
  }
  LlmResponse out;
  out.text = std::move(reply.body);
  out.model = request.model;
  return out;
}

// Retries and rate limiting -----------------------------------------------------------

std::chrono::milliseconds RetryPolicy::delay(int retry) const {
  const double ms = static_cast<double>(initial_delay.count()) * std::pow(multiplier, retry - 1);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::min(ms, static_cast<double>(max_delay.count()))));
}

RateLimiter::RateLimiter(double requests_per_minute, Sleeper sleep) : sleep_(std::move(sleep)) {
  if (requests_per_minute < 0.0) throw ConfigError("requests per minute must be >= 0");
  if (requests_per_minute > 0.0) {
    interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(60.0 / requests_per_minute));
  }
  if (!sleep_) sleep_ = [](Clock::duration d) { std::this_thread::sleep_for(d); };
}

void RateLimiter::acquire() {
  if (interval_ == Clock::duration::zero()) return;
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    slot = next_ ? std::max(*next_, now) : now;
    next_ = slot + interval_;
  }
  const auto wait = slot - Clock::now();
  if (wait > Clock::duration::zero()) sleep_(wait);
}

// Client ------------------------------------------------------------------------------

LlmClient::LlmClient(ClientConfig config, std::shared_ptr<Backend> backend)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      limiter_(config_.requests_per_minute,
               config_.sleep ? RateLimiter::Sleeper([s = config_.sleep](RateLimiter::Clock::duration d) {
                 s(std::chrono::duration_cast<std::chrono::milliseconds>(d));
               })
                             : RateLimiter::Sleeper{}) {
  if (config_.retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
  if (config_.cache_dir) cache_.emplace(*config_.cache_dir);
  if (config_.kind == BackendKind::ReplayCache) {
    if (!cache_) throw ConfigError("replay-cache backend needs a cache directory");
  } else if (!backend_) {
    throw ConfigError(std::string(to_string(config_.kind)) + " backend was not provided");
  }
  if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

LlmResponse LlmClient::send_with_retries(const LlmRequest& request) {
  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    try {
      ++live_calls_;
      return backend_->send(request);
    } catch (const TransientError& e) {
      if (attempt >= config_.retry.max_attempts) {
        throw TransportError("giving up after " + std::to_string(attempt) + " attempts: " + e.what());
      }
      config_.sleep(config_.retry.delay(attempt));
    }
  }
}

LlmResponse LlmClient::complete(const LlmRequest& request) {
  validate_request(request);
  const CacheKey key = cache_key(request);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      ++cache_hits_;
      return *hit;
    }
  }
  if (config_.kind == BackendKind::ReplayCache) throw ReplayMissError(key.digest);
  LlmResponse response = send_with_retries(request);
  response.cached = false;
  if (cache_) cache_->put(key, request, response);
  return response;
}

}  // namespace gecforge::llm
