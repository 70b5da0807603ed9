#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cojump/stats.hpp"

using namespace cojump::stats;

namespace {

// sup |F_n - Phi| checked on both sides of every jump of F_n.
double brute_force_ks(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (double x : xs) {
    double below = 0.0;
    double at = 0.0;
    for (double y : xs) {
      if (y < x) below += 1.0;
      if (y <= x) at += 1.0;
    }
    const double phi = standard_normal_cdf(x);
    d = std::max({d, std::abs(at / m - phi), std::abs(below / m - phi)});
  }
  return d;
}

}  // namespace

TEST(Stats, MeanAndVariance) {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_estimate(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.std_error, std::sqrt(5.0 / 12.0));
  EXPECT_DOUBLE_EQ(variance_estimate(xs).variance, 5.0 / 3.0);
  EXPECT_THROW(mean_estimate(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(variance_estimate(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Stats, VarianceStandardErrorMatchesGaussianTheory) {
  // For N(0,1), Var of the sample variance is about 2/m.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> xs(200000);
  for (auto& x : xs) x = z(rng);
  const auto v = variance_estimate(xs);
  EXPECT_NEAR(v.std_error, std::sqrt(2.0 / xs.size()), 0.05 * std::sqrt(2.0 / xs.size()));
  EXPECT_LT(std::abs(v.variance - 1.0), 4.0 * v.std_error);
}

TEST(Stats, QuantileType7) {
  const std::vector<double> xs{3.0, 1.0, 4.0, 2.0};
  EXPECT_EQ(quantile(xs, 0.0), 1.0);
  EXPECT_EQ(quantile(xs, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.25), 1.75);
  EXPECT_EQ(median({5.0}), 5.0);
  EXPECT_THROW(quantile(xs, 1.5), std::invalid_argument);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

TEST(Stats, KsMatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.3, 1.2);
  for (std::size_t m = 1; m <= 50; ++m) {
    std::vector<double> xs(m);
    for (auto& x : xs) x = z(rng);
    if (m % 5 == 0) xs[1] = xs[0];  // ties
    EXPECT_NEAR(ks_distance_normal(xs), brute_force_ks(xs), 1e-15) << m;
  }
}

TEST(Stats, KsKnownValues) {
  EXPECT_DOUBLE_EQ(ks_distance_normal(std::vector<double>(40, 0.0)), 0.5);
  EXPECT_NEAR(ks_critical_95(100), 0.136, 1e-15);
  // Size of the 95% band under the null, and power against a shift.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  int rejected = 0;
  int detected = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(2000);
    for (auto& x : xs) x = z(rng);
    if (ks_distance_normal(xs) > ks_critical_95(xs.size())) ++rejected;
    for (auto& x : xs) x += 0.2;
    if (ks_distance_normal(xs) > ks_critical_95(xs.size())) ++detected;
  }
  EXPECT_GE(rejected, 5);
  EXPECT_LE(rejected, 40);
  EXPECT_GE(detected, 390);
}

TEST(Stats, LineFitExactAndValidation) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
  const auto fit = fit_line(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-14);
  EXPECT_NEAR(fit.half_width, 0.0, 1e-12);
  EXPECT_THROW(fit_line(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
               std::invalid_argument);
  EXPECT_THROW(fit_line(std::vector<double>{1.0, 1.0, 1.0}, std::vector<double>{1.0, 2.0, 3.0}),
               std::invalid_argument);
  EXPECT_THROW(fit_log_log(x, std::vector<double>{1.0, 0.0, 1.0, 2.0}), std::domain_error);
}

TEST(Stats, LogLogSlopeRecovery) {
  // y = h^s (1 + noise): the fitted slope lands inside its own 95% band most of the time.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const double s = 1.0 + 0.005 * t;
    std::vector<double> h;
    std::vector<double> y;
    for (int k = 8; k <= 14; ++k) {
      h.push_back(std::ldexp(1.0, -k));
      y.push_back(std::pow(h.back(), s) * (1.0 + noise(rng)));
    }
    const auto fit = fit_log_log(h, y);
    EXPECT_NEAR(fit.slope, s, 0.05);
    if (std::abs(fit.slope - s) <= fit.half_width) ++covered;
  }
  EXPECT_GE(covered, 180);
}
