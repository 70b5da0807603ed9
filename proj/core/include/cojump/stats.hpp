#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cojump::stats {

struct MeanEstimate {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
  std::size_t count = 0;
};

MeanEstimate mean_estimate(std::span<const double> xs);

/// Sample variance with a delta-method standard error from the fourth
/// central moment.
struct VarianceEstimate {
  double variance = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

VarianceEstimate variance_estimate(std::span<const double> xs);

/// Linear-interpolation quantile (Hyndman-Fan type 7). p in [0, 1].
double quantile(std::vector<double> xs, double p);

double median(std::vector<double> xs);

double standard_normal_cdf(double x);

/// sup_x |F_n(x) - Phi(x)|.
double ks_distance_normal(std::vector<double> xs);

/// Asymptotic 95% Kolmogorov-Smirnov critical value 1.36 / sqrt(m).
double ks_critical_95(std::size_t m);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double half_width = 0.0;  // 95% confidence half-width for the slope
  double r_squared = 0.0;
  double max_abs_residual = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares of y on x; needs at least 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// OLS of log(y) on log(x); all values must be positive.
LineFit fit_log_log(std::span<const double> x, std::span<const double> y);

}  // namespace cojump::stats
