#include "gecforge/manifest.hpp"

#include <chrono>
#include <ctime>

#include "gecforge/corpus.hpp"
#include "gecforge/text.hpp"

namespace gecforge {

std::string_view version() noexcept { return GECFORGE_VERSION; }

void RunManifest::add_input(const std::filesystem::path& path) {
  input_digests[path.string()] = sha256_hex(corpus::read_file(path));
}

std::string RunManifest::config_hash() const { return sha256_hex(config.dump()); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["command_line"] = command_line;
  j["version"] = std::string(version());
  j["timestamp"] = timestamp.empty() ? utc_timestamp() : timestamp;
  j["backend"] = backend;
  j["config"] = config;
  j["config_hash"] = config_hash();
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : input_digests) j["inputs"][path] = digest;
  j["live_calls"] = live_calls;
  j["cache_hits"] = cache_hits;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir) {
  const auto path = out_dir / (manifest.command + ".manifest.json");
  corpus::write_file_atomic(path, manifest.to_json().dump(2) + "\n");
  return path;
}

}  // namespace gecforge
