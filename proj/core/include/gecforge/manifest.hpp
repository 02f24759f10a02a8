#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gecforge {

std::string_view version() noexcept;

/// Provenance of one pipeline run, written next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> command_line;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();  // resolved values, no secrets
  std::map<std::string, std::string> input_digests;                 // path -> sha256
  std::string backend;
  std::size_t live_calls = 0;
  std::size_t cache_hits = 0;
  std::string timestamp;  // UTC, ISO 8601

  void add_input(const std::filesystem::path& path);
  std::string config_hash() const;
  nlohmann::ordered_json to_json() const;
};

std::string utc_timestamp();

/// Writes `<out_dir>/<command>.manifest.json`.
std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

}  // namespace gecforge
