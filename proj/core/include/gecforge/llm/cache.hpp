#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "gecforge/llm/request.hpp"

namespace gecforge::llm {

struct CacheStats {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
  std::size_t corrupt = 0;  // unreadable, or stored request does not hash to its key
  std::size_t temporary = 0;  // leftovers from interrupted writes
};

/// One JSON file per key at `<root>/<first two hex>/<digest>.json`, holding
/// the keyed request and the response. Writes go through a temporary file and
/// a rename, so concurrent writers and interrupted runs never leave a torn entry.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path entry_path(const CacheKey& key) const;

  /// Entries whose stored request does not reproduce `key` are treated as misses.
  std::optional<LlmResponse> get(const CacheKey& key) const;
  void put(const CacheKey& key, const LlmRequest& request, const LlmResponse& response) const;

  CacheStats stats() const;

  /// Removes temporary and corrupt files, plus entries older than `max_age`
  /// when given. Returns the number of files removed.
  std::size_t gc(std::optional<std::chrono::seconds> max_age = std::nullopt) const;

 private:
  std::filesystem::path root_;
};

}  // namespace gecforge::llm
