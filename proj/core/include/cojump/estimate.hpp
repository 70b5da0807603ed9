#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cojump/model.hpp"

namespace cojump {

/// Increments of (X1, X2) over n equally spaced steps of length h.
class IncrementPair {
 public:
  IncrementPair(double h, std::vector<double> dx1, std::vector<double> dx2);

  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] std::size_t size() const { return dx1_.size(); }
  [[nodiscard]] std::span<const double> first() const { return dx1_; }
  [[nodiscard]] std::span<const double> second() const { return dx2_; }

  bool operator==(const IncrementPair&) const = default;

 private:
  double h_;
  std::vector<double> dx1_;
  std::vector<double> dx2_;
};

/// Squared-increment truncation levels. The estimators use one shared level;
/// distinct per-component levels are an opt-in extension.
struct TruncationLevels {
  double first;
  double second;

  static TruncationLevels shared(double level) { return {level, level}; }
  static TruncationLevels none();
  static TruncationLevels from_rule(const ThresholdRule& rule, double h);
};

/// sum_j dx1_j * dx2_j
double realized_covariation(const IncrementPair& inc);

/// h^(1-(r+l)/2) sum_j dx1_j^r 1{dx1_j^2 <= r_h} dx2_j^l 1{dx2_j^2 <= r_h}
double threshold_stat(const IncrementPair& inc, int r, int l, TruncationLevels levels);
double threshold_stat(const IncrementPair& inc, int r, int l, const ThresholdRule& rule);

/// h^-1 sum_{j<n} of the four individually truncated factors of steps j, j+1.
double adjacent_stat(const IncrementPair& inc, TruncationLevels levels);
double adjacent_stat(const IncrementPair& inc, const ThresholdRule& rule);

struct CojumpInterval {
  std::size_t index;  // 1-based step index j
  double product;     // dx1_j * dx2_j
  bool operator==(const CojumpInterval&) const = default;
};

struct CojumpEstimate {
  double sum;  // realized covariation minus v11, summed over the dropped steps
  std::vector<CojumpInterval> intervals;
};

CojumpEstimate cojump_estimates(const IncrementPair& inc, TruncationLevels levels);
CojumpEstimate cojump_estimates(const IncrementPair& inc, const ThresholdRule& rule);

/// (v11 - truth) / (sqrt(h) sqrt(v22 - w)); empty when v22 - w <= 0.
std::optional<double> normalized_bias(const IncrementPair& inc, TruncationLevels levels,
                                      double truth);
std::optional<double> normalized_bias(const IncrementPair& inc, const ThresholdRule& rule,
                                      double truth);

/// Extra v_{r,l} requested on top of the fixed set.
struct ExtraMoment {
  int r;
  int l;
  double value;
};

struct EstimatorReport {
  std::size_t steps = 0;
  double step = 0.0;
  TruncationLevels threshold_used{0.0, 0.0};
  double realized_cov = 0.0;
  double v11 = 0.0;
  double v22 = 0.0;
  double w = 0.0;
  double cojump_sum = 0.0;
  std::vector<CojumpInterval> cojump_intervals;
  std::optional<double> truth;
  std::optional<double> nb;
  bool nb_degenerate = false;
  std::optional<ExtraMoment> extra;
};

EstimatorReport estimate_all(const IncrementPair& inc, TruncationLevels levels,
                             std::optional<double> truth = std::nullopt);

}  // namespace cojump
