#include "cojump/manifest.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cojump/csv_io.hpp"

#ifndef COJUMP_VERSION
#define COJUMP_VERSION "0.0.0"
#endif

namespace cojump {

std::string_view tool_version() { return COJUMP_VERSION; }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  j["command"] = command;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("manifest: {}", e.what()));
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path write_manifest(const RunManifest& manifest) {
  if (manifest.outputs.empty()) throw std::invalid_argument("manifest lists no outputs");
  std::filesystem::path path = manifest.outputs.front();
  path += ".manifest.json";
  write_file_atomic(path, manifest.to_json());
  return path;
}

}  // namespace cojump
