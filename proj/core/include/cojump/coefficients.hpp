#pragma once

#include <array>
#include <variant>
#include <vector>

namespace cojump {

struct ConstantPath {
  double value = 0.0;
  bool operator==(const ConstantPath&) const = default;
};

enum class Interpolation { Linear, Step };

/// Tabulated deterministic path. Step mode is right-continuous piecewise
/// constant; both modes extrapolate flat outside the table.
struct TabulatedPath {
  std::vector<double> times;
  std::vector<double> values;
  Interpolation mode = Interpolation::Linear;
  bool operator==(const TabulatedPath&) const = default;
};

using TimeFunction = std::variant<ConstantPath, TabulatedPath>;

double evaluate(const TimeFunction& f, double t);

/// Variance process dv = kappa (theta - v) dt + xi sqrt(v) dB, sigma = sqrt(v).
/// Simulated with full-truncation Euler on the observation grid.
struct SquareRootVariance {
  double kappa = 1.0;
  double theta = 1.0;
  double xi = 0.0;
  double v0 = 1.0;
  bool operator==(const SquareRootVariance&) const = default;
};

using VolatilitySpec = std::variant<ConstantPath, TabulatedPath, SquareRootVariance>;

struct CoefficientSpec {
  std::array<TimeFunction, 2> drift{ConstantPath{0.0}, ConstantPath{0.0}};
  std::array<VolatilitySpec, 2> vol{ConstantPath{1.0}, ConstantPath{1.0}};
  TimeFunction corr = ConstantPath{0.0};

  /// sigma >= 0 and |rho| <= 1 at every table node; tables sorted.
  void validate() const;

  [[nodiscard]] bool deterministic() const;
  [[nodiscard]] bool volatility_identically_zero() const;

  bool operator==(const CoefficientSpec&) const = default;
};

}  // namespace cojump
