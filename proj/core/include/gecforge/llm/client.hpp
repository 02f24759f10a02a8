#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/llm/cache.hpp"
#include "gecforge/llm/request.hpp"

namespace gecforge::llm {

enum class BackendKind { LiveApi, ReplayCache, ScriptedMock };

/// Accepts "live-api", "replay-cache", "scripted-mock" and the short forms
/// "live", "replay", "mock".
BackendKind parse_backend_kind(std::string_view name);
std::string_view to_string(BackendKind kind);

/// Something that turns a request into a completion. Implementations must be
/// safe to call from several threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual LlmResponse send(const LlmRequest& request) = 0;
};

/// Deterministic stand-in for a provider. A script is a JSON array whose
/// elements are either replies or rules:
///
///   "text"                                  next sequential reply
///   {"when": "substr", "replies": [...]}    replies for user prompts containing substr
///
/// A reply is a string or {"error": "transient"|"transport"|"refusal", "body": "..."}.
/// Rules are tried in order before the sequential list. Each list is consumed
/// front to back and its last reply repeats once exhausted.
class ScriptedMockBackend : public Backend {
 public:
  struct Reply {
    enum class Kind { Text, Transient, Transport, Refusal } kind = Kind::Text;
    std::string body;
  };

  explicit ScriptedMockBackend(std::vector<std::string> sequential);
  static std::shared_ptr<ScriptedMockBackend> from_json(const nlohmann::json& script);
  static std::shared_ptr<ScriptedMockBackend> from_file(const std::filesystem::path& path);

  LlmResponse send(const LlmRequest& request) override;
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  struct Rule {
    std::string when;
    std::vector<Reply> replies;
    std::size_t next = 0;
  };

  ScriptedMockBackend() = default;
  static const Reply& take(std::vector<Reply>& replies, std::size_t& next);

  std::mutex mutex_;
  std::vector<Rule> rules_;
  std::vector<Reply> sequential_;
  std::size_t next_ = 0;
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};

  /// Delay before retry number `retry` (1-based).
  std::chrono::milliseconds delay(int retry) const;
};

/// Token bucket of capacity one shared by every caller: admissions are spaced
/// at least 60/rpm seconds apart. A rate of zero disables limiting.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  using Sleeper = std::function<void(Clock::duration)>;

  explicit RateLimiter(double requests_per_minute, Sleeper sleep = {});
  void acquire();

 private:
  Clock::duration interval_{};
  Sleeper sleep_;
  std::mutex mutex_;
  std::optional<Clock::time_point> next_;
};

struct ClientConfig {
  BackendKind kind = BackendKind::ScriptedMock;
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;
  double requests_per_minute = 0.0;
  /// Replaces real sleeping for retries and rate limiting (tests).
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// Cache-first completion. Under replay-cache a miss is a ReplayMissError and
/// no backend is ever contacted; otherwise a miss goes to the backend and the
/// result is stored before it is returned.
class LlmClient {
 public:
  /// `backend` may be null only for replay-cache, which requires a cache dir.
  LlmClient(ClientConfig config, std::shared_ptr<Backend> backend);

  LlmResponse complete(const LlmRequest& request);

  BackendKind kind() const noexcept { return config_.kind; }
  std::size_t live_calls() const noexcept { return live_calls_.load(); }
  std::size_t cache_hits() const noexcept { return cache_hits_.load(); }

 private:
  LlmResponse send_with_retries(const LlmRequest& request);

  ClientConfig config_;
  std::shared_ptr<Backend> backend_;
  std::optional<ResponseCache> cache_;
  RateLimiter limiter_;
  std::atomic<std::size_t> live_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace gecforge::llm
