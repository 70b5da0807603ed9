#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cojump/experiments.hpp"
#include "cojump/model.hpp"
#include "cojump/simulate.hpp"

namespace cojump {

/// Unreadable file, unknown section/key or malformed value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything one INI file can describe. See docs/config.md for the keys.
struct RunConfig {
  ModelSpec model;
  SimConfig simulation;
  ThresholdRule threshold{1.0, 0.9};
  ExperimentKind experiment = ExperimentKind::Consistency;
  std::vector<std::size_t> n_ladder;
  std::size_t replications = 100;
  bool parallel = false;
  std::optional<double> ks_limit;

  [[nodiscard]] ExperimentPlan plan() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text: fixed section and key order, shortest round-trip numbers.
/// parse_config(canonical_text(c)) reproduces c.
std::string canonical_text(const RunConfig& config);

/// FNV-1a 64 over the sorted canonical "section.key=value" lines.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace cojump
