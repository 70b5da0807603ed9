#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cojump/model.hpp"
#include "cojump/simulate.hpp"
#include "cojump/stats.hpp"

namespace cojump {

enum class ExperimentKind { Consistency, Normality, StderrLimit, CojumpRates, SmallJumpVariance };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::Consistency;
  ModelSpec model;
  ThresholdRule rule{1.0, 0.9};
  std::vector<std::size_t> n_ladder;
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  CutoffPolicy cutoff = ResidualVarianceFraction{};
  /// Run replications on worker threads. Every replication owns its RNG
  /// stream and result slot, so the report is identical either way.
  bool parallel = false;
  /// KS acceptance band for normality checks; 1.36/sqrt(M) when empty.
  std::optional<double> ks_limit;

  void validate() const;
};

struct Metric {
  std::string name;
  double value;
};

struct RungResult {
  std::size_t steps = 0;
  double step = 0.0;
  double threshold = 0.0;
  std::size_t replications = 0;
  std::vector<Metric> metrics;

  void set(std::string name, double value);
  /// NaN when absent.
  [[nodiscard]] double metric(std::string_view name) const;
};

struct SlopeFit {
  std::string quantity;
  stats::LineFit fit;
  std::optional<double> target;
  double tolerance = 0.0;
  bool passed = true;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Reported but outside the scope the check is meant to certify.
  bool exploratory = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Consistency;
  std::vector<RungResult> rungs;
  std::vector<SlopeFit> fits;
  std::vector<CheckResult> checks;
  std::size_t degenerate_total = 0;
  std::vector<std::string> notes;

  /// True when every non-exploratory check passed.
  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] const CheckResult* find_check(std::string_view name) const;
};

/// Slope acceptance band for the rate regressions.
inline constexpr double kSlopeTolerance = 0.15;

/// Exponent of the slowest-decaying term of E[H'] as h -> 0.
double cojump_mean_exponent(double alpha1, double alpha2, double beta);
/// Exponent of the slowest-decaying term of Var(H') as h -> 0.
double cojump_variance_exponent(double alpha1, double alpha2, double beta);

ExperimentReport run_consistency(const ExperimentPlan& plan);
ExperimentReport run_normality(const ExperimentPlan& plan);
ExperimentReport run_stderr_limit(const ExperimentPlan& plan);
ExperimentReport run_cojump_rates(const ExperimentPlan& plan);
ExperimentReport run_small_jump_variance(const ExperimentPlan& plan);

ExperimentReport run_experiment(const ExperimentPlan& plan);

}  // namespace cojump
