#include "gecforge/llm/cache.hpp"

#include <fstream>
#include <sstream>

#include "gecforge/corpus.hpp"
#include "gecforge/errors.hpp"

namespace gecforge::llm {

namespace fs = std::filesystem;

namespace {

enum class EntryState { Valid, Corrupt, Temporary };

std::optional<nlohmann::json> read_entry(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

// Recomputes the key from the stored request so a hand-edited or truncated
// entry can never be served for the wrong request.
std::optional<LlmResponse> decode(const nlohmann::json& j, const std::string& digest) {
  try {
    if (j.at("key").get<std::string>() != digest) return std::nullopt;
    if (cache_key(request_from_json(j.at("request"))).digest != digest) return std::nullopt;
    return response_from_json(j.at("response"));
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

EntryState classify(const fs::path& p) {
  const std::string name = p.filename().string();
  if (name.find(".tmp") != std::string::npos) return EntryState::Temporary;
  if (p.extension() != ".json") return EntryState::Corrupt;
  const auto j = read_entry(p);
  if (!j || !decode(*j, p.stem().string())) return EntryState::Corrupt;
  return EntryState::Valid;
}

}  // namespace

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {}

fs::path ResponseCache::entry_path(const CacheKey& key) const {
  if (key.digest.size() < 3) throw InvariantError("malformed cache key");
  return root_ / key.digest.substr(0, 2) / (key.digest + ".json");
}

std::optional<LlmResponse> ResponseCache::get(const CacheKey& key) const {
  const auto j = read_entry(entry_path(key));
  if (!j) return std::nullopt;
  auto r = decode(*j, key.digest);
  if (r) r->cached = true;
  return r;
}

void ResponseCache::put(const CacheKey& key, const LlmRequest& request, const LlmResponse& response) const {
  nlohmann::ordered_json j;
  j["key"] = key.digest;
  j["request"] = to_json(request);
  j["response"] = to_json(response);
  const fs::path path = entry_path(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create cache directory " + path.parent_path().string() + ": " + ec.message());
  corpus::write_file_atomic(path, j.dump(2) + "\n");
}

CacheStats ResponseCache::stats() const {
  CacheStats s;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return s;
  for (const auto& f : fs::recursive_directory_iterator(root_)) {
    if (!f.is_regular_file()) continue;
    switch (classify(f.path())) {
      case EntryState::Valid:
        ++s.entries;
        s.bytes += f.file_size();
        break;
      case EntryState::Corrupt:
        ++s.corrupt;
        break;
      case EntryState::Temporary:
        ++s.temporary;
        break;
    }
  }
  return s;
}

std::size_t ResponseCache::gc(std::optional<std::chrono::seconds> max_age) const {
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return 0;
  const auto now = fs::file_time_type::clock::now();
  std::vector<fs::path> doomed;
  for (const auto& f : fs::recursive_directory_iterator(root_)) {
    if (!f.is_regular_file()) continue;
    bool remove = classify(f.path()) != EntryState::Valid;
    if (!remove && max_age) remove = now - f.last_write_time() > *max_age;
    if (remove) doomed.push_back(f.path());
  }
  std::size_t removed = 0;
  for (const auto& p : doomed) removed += fs::remove(p, ec) ? 1 : 0;
  return removed;
}

}  // namespace gecforge::llm
