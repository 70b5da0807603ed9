#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cojump {

std::string_view tool_version();

/// Enough to rerun an invocation: the effective config (by hash and as a
/// canonical copy next to the outputs), seed and command line.
struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::string command;
  std::vector<std::string> outputs;

  [[nodiscard]] std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

std::string utc_timestamp();

/// Writes `<first output>.manifest.json` and returns its path.
std::filesystem::path write_manifest(const RunManifest& manifest);

}  // namespace cojump
