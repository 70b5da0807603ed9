#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cojump/estimate.hpp"
#include "cojump/experiments.hpp"
#include "cojump/simulate.hpp"

namespace cojump {

/// Malformed or unreadable data file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns of a paths CSV: time, x1, x2 and optionally the ground-truth parts
/// d1, d2 (diffusion), j1a, j1b (finite-activity jumps of components 1 and 2)
/// and j2a, j2b (compensated small jumps of components 1 and 2).
struct PathTable {
  std::map<std::string, std::string> meta;
  std::vector<double> time;
  std::array<std::vector<double>, 2> level;
  bool has_truth = false;
  std::array<ComponentTruth, 2> truth;

  static PathTable from_path(const PathPair& path, bool with_truth);
  [[nodiscard]] IncrementPair increments() const;

  bool operator==(const PathTable&) const = default;
};

/// Shortest text that parses back to the same double, padded to 17
/// significant digits.
std::string format_number(double v);
double parse_number(std::string_view text);

std::string paths_to_csv(const PathTable& table);
PathTable paths_from_csv(const std::string& text);

/// "# h=<value>" then a dx1,dx2 header and one row per step.
std::string increments_to_csv(const IncrementPair& inc);
IncrementPair increments_from_csv(const std::string& text);

/// One header row and one value row; the flagged intervals go in the JSON form.
std::string report_to_csv(const EstimatorReport& report);
std::string report_to_json(const EstimatorReport& report);

/// One row per rung: steps, step, threshold, replications, then metrics in
/// first-seen order.
std::string rungs_to_csv(const ExperimentReport& report);
/// quantity, slope, slope_se, half_width, intercept, r_squared, target, tolerance, passed
std::string fits_to_csv(const ExperimentReport& report);
/// Plain-text summary with one PASS/FAIL line per check.
std::string experiment_summary(const ExperimentReport& report);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace cojump
