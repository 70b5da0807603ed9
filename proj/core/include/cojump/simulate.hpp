#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "cojump/estimate.hpp"
#include "cojump/model.hpp"

namespace cojump {

using Rng = std::mt19937_64;

/// Independent engine for (seed, path index, purpose).
Rng make_stream(std::uint64_t seed, std::uint64_t path_index, std::uint64_t purpose);

/// Infinite-activity jumps at or below epsilon are not simulated.
struct ExplicitCutoff {
  double epsilon = 1e-3;
  bool operator==(const ExplicitCutoff&) const = default;
};

/// Picks epsilon so that eta^2(epsilon) / eta^2(1) <= delta on every branch.
struct ResidualVarianceFraction {
  double delta = 1e-4;
  bool operator==(const ResidualVarianceFraction&) const = default;
};

using CutoffPolicy = std::variant<ResidualVarianceFraction, ExplicitCutoff>;

struct SimConfig {
  std::size_t steps = 1024;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  CutoffPolicy cutoff = ResidualVarianceFraction{};
  /// Upper bound on the expected number of simulated small jumps per path.
  double max_expected_ia_jumps = 5e7;

  void validate() const;
};

/// Small-jump cutoff for the model's IA parts; empty when there are none.
std::optional<double> resolve_cutoff(const ModelSpec& model, const CutoffPolicy& policy);

/// Equally spaced grid t_k = k h, h = T / n, with t_n = T.
struct Grid {
  double horizon;
  std::size_t steps;

  [[nodiscard]] double step() const { return horizon / static_cast<double>(steps); }
  [[nodiscard]] double time(std::size_t k) const;
  /// 0-based increment index j such that t lies in (t_j, t_{j+1}].
  [[nodiscard]] std::size_t bin(double t) const;
};

struct JumpEvent {
  double time;
  double size;
  bool operator==(const JumpEvent&) const = default;
};

struct CommonJump {
  double time;
  double size1;
  double size2;
  bool operator==(const CommonJump&) const = default;
};

struct JumpLedger {
  std::array<std::vector<JumpEvent>, 2> fa;
  std::array<std::vector<JumpEvent>, 2> ia;  // includes the coupled jumps
  std::vector<CommonJump> common_fa;
  std::vector<CommonJump> common_ia;

  bool operator==(const JumpLedger&) const = default;
};

struct BrownianIncrements {
  std::vector<double> first;
  std::vector<double> second;
};

/// dW2 = rho_j dW1 + sqrt(1 - rho_j^2) dW3 with rho taken at left endpoints.
BrownianIncrements simulate_brownian_pair(std::span<const double> corr, double h, Rng& rng);

/// Compound Poisson jumps on (0, T], sorted by time.
std::vector<JumpEvent> simulate_fa_jumps(const FiniteActivityJumpSpec& spec, double horizon,
                                         Rng& rng);

struct IaSimulation {
  std::array<std::vector<JumpEvent>, 2> jumps;
  std::vector<CommonJump> common;
  /// Per-step compensated increments (jump sum minus compensator_mean).
  std::array<std::vector<double>, 2> increments;
};

/// Small jumps in (cutoff, 1] coupled by the Levy copula C_gamma.
///
/// Each sign branch splits into component-only Poisson streams with intensity
/// gamma * nu_q and one common stream with intensity (1 - gamma) on tail levels,
/// mapped to sizes by inverse_tail in both components.
IaSimulation simulate_ia_jumps(const std::optional<InfiniteActivityJumpSpec>& spec1,
                               const std::optional<InfiniteActivityJumpSpec>& spec2,
                               const CopulaSpec& copula, double cutoff, const Grid& grid,
                               Rng& rng, double max_expected_jumps = 5e7);

struct ComponentTruth {
  std::vector<double> diffusion;  // D
  std::vector<double> fa_jumps;   // J1
  std::vector<double> ia_jumps;   // compensated small jumps
  bool operator==(const ComponentTruth&) const = default;
};

struct PathPair {
  double horizon = 0.0;
  std::size_t steps = 0;
  double step = 0.0;
  std::vector<double> time;
  std::array<std::vector<double>, 2> level;
  std::array<ComponentTruth, 2> truth;
  /// Coefficients at left endpoints t_0..t_{n-1}.
  std::array<std::vector<double>, 2> sigma;
  std::vector<double> corr;
  double integrated_covariation = 0.0;
  double cojump_sum = 0.0;
  std::optional<double> cutoff;
  JumpLedger ledger;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  bool operator==(const PathPair&) const = default;
};

/// Levels are formed as x0 + D + J1 + J2 at every grid point, so the
/// decomposition holds with zero tolerance.
inline constexpr double kDecompositionTolerance = 0.0;

PathPair assemble_paths(const ModelSpec& model, const SimConfig& config);

IncrementPair increments_of(const PathPair& path);

/// Ground-truth increments of the compensated small-jump parts.
IncrementPair ia_increments_of(const PathPair& path);

/// Per-step compensated increments of the jumps with lo < |size| <= hi.
std::vector<double> band_increments(const PathPair& path, const InfiniteActivityJumpSpec& spec,
                                    int component, double lo, double hi);

/// Number of coupled small jumps with size1 > a and size2 > b.
std::size_t joint_excess_count(const JumpLedger& ledger, double a, double b);

}  // namespace cojump
