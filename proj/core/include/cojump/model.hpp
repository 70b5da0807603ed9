#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "cojump/coefficients.hpp"

namespace cojump {

/// Power-law Levy density scale * x^(-1-alpha) on x > 0.
struct PowerLawTail {
  double scale = 1.0;
  double alpha = 0.5;
  bool operator==(const PowerLawTail&) const = default;
};

/// Levy mass of jumps of size >= x: scale * x^-alpha / alpha.
double tail_integral(const PowerLawTail& tail, double x);

/// Jump size whose tail mass equals `mass`.
double inverse_tail(const PowerLawTail& tail, double mass);

/// Size y of the partner jump on the total-dependence curve U_to(y) = U_from(x).
double dependent_partner_size(const PowerLawTail& from, const PowerLawTail& to, double x);

/// Stable-like small-jump component with jumps bounded by 1 in absolute value.
///
/// The positive branch has density scale * x^(-1-alpha) on (0, 1]. An optional
/// mirrored negative branch carries its own (scale, alpha) on [-1, 0).
class InfiniteActivityJumpSpec {
 public:
  InfiniteActivityJumpSpec(double scale, double alpha,
                           std::optional<PowerLawTail> negative = std::nullopt);

  [[nodiscard]] double scale() const { return positive_.scale; }
  [[nodiscard]] double alpha() const { return positive_.alpha; }
  [[nodiscard]] const PowerLawTail& positive() const { return positive_; }
  [[nodiscard]] const std::optional<PowerLawTail>& negative() const { return negative_; }

  bool operator==(const InfiniteActivityJumpSpec&) const = default;

 private:
  PowerLawTail positive_;
  std::optional<PowerLawTail> negative_;
};

/// eta^2(eps) = integral of x^2 nu(dx) over 0 < |x| <= eps.
double truncated_second_moment(const InfiniteActivityJumpSpec& spec, double eps);

/// h * integral of x nu(dx) over eps < |x| <= 1 (signed across branches).
double compensator_mean(const InfiniteActivityJumpSpec& spec, double eps, double h);

/// integral of x nu(dx) over lo < |x| <= hi, signed, 0 < lo <= hi <= 1.
double band_first_moment(const InfiniteActivityJumpSpec& spec, double lo, double hi);

/// Levy mass of lo < |x| <= hi.
double band_mass(const InfiniteActivityJumpSpec& spec, double lo, double hi);

// ---------------------------------------------------------------------------
// Finite activity jumps
// ---------------------------------------------------------------------------

struct NormalJumpSize {
  double mean = 0.0;
  double stddev = 1.0;
  bool operator==(const NormalJumpSize&) const = default;
};

/// |size| uniform on [low, high], positive with probability prob_positive.
struct UniformMagnitudeJumpSize {
  double low = 0.5;
  double high = 1.0;
  double prob_positive = 0.5;
  bool operator==(const UniformMagnitudeJumpSize&) const = default;
};

struct FixedJumpSize {
  double size = 1.0;
  bool operator==(const FixedJumpSize&) const = default;
};

using JumpSizeLaw = std::variant<NormalJumpSize, UniformMagnitudeJumpSize, FixedJumpSize>;

class FiniteActivityJumpSpec {
 public:
  FiniteActivityJumpSpec(double intensity, JumpSizeLaw law);

  [[nodiscard]] double intensity() const { return intensity_; }
  [[nodiscard]] const JumpSizeLaw& size_law() const { return law_; }

  /// Draws a jump size; never returns exactly 0.
  double sample_size(std::mt19937_64& rng) const;

  bool operator==(const FiniteActivityJumpSpec&) const = default;

 private:
  double intensity_;
  JumpSizeLaw law_;
};

// ---------------------------------------------------------------------------

/// C_gamma = gamma * independence + (1 - gamma) * total dependence.
class CopulaSpec {
 public:
  CopulaSpec() : CopulaSpec(1.0) {}
  explicit CopulaSpec(double gamma);
  [[nodiscard]] double gamma() const { return gamma_; }
  bool operator==(const CopulaSpec&) const = default;

 private:
  double gamma_;
};

/// r(h) = coeff * h^beta with beta in (0, 1).
class ThresholdRule {
 public:
  ThresholdRule(double coeff, double beta);

  [[nodiscard]] double coeff() const { return coeff_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double level(double h) const;
  double operator()(double h) const { return level(h); }

  bool operator==(const ThresholdRule&) const = default;

 private:
  double coeff_;
  double beta_;
};

/// Deterministic jump injected into the finite-activity parts at a known time.
struct ForcedJump {
  double time = 0.0;
  double size1 = 0.0;
  double size2 = 0.0;
  bool operator==(const ForcedJump&) const = default;
};

struct ModelSpec {
  CoefficientSpec coefficients;
  std::array<std::optional<FiniteActivityJumpSpec>, 2> fa_jumps;
  /// Drive both finite-activity counters with one Poisson clock.
  bool shared_fa_clock = false;
  std::vector<ForcedJump> forced_jumps;
  std::array<std::optional<InfiniteActivityJumpSpec>, 2> ia_jumps;
  CopulaSpec copula;
  double horizon = 1.0;
  std::array<double, 2> initial{0.0, 0.0};

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;

  [[nodiscard]] bool has_ia_jumps() const { return ia_jumps[0] || ia_jumps[1]; }
  [[nodiscard]] bool has_fa_jumps() const {
    return fa_jumps[0] || fa_jumps[1] || !forced_jumps.empty();
  }

  bool operator==(const ModelSpec&) const = default;
};

}  // namespace cojump
