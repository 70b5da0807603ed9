#include "cojump/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "cojump/numeric.hpp"

namespace cojump::stats {

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate out;
  out.count = xs.size();
  if (xs.empty()) throw std::invalid_argument("mean_estimate: empty sample");
  numeric::Accumulator sum;
  for (double x : xs) sum.add(x);
  out.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    numeric::Accumulator ss;
    for (double x : xs) ss.add((x - out.mean) * (x - out.mean));
    out.variance = ss.value() / static_cast<double>(xs.size() - 1);
    out.std_error = std::sqrt(out.variance / static_cast<double>(xs.size()));
  }
  return out;
}

VarianceEstimate variance_estimate(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance_estimate: need >= 2 samples");
  const double n = static_cast<double>(xs.size());
  const MeanEstimate m = mean_estimate(xs);
  numeric::Accumulator m4;
  for (double x : xs) {
    const double d2 = (x - m.mean) * (x - m.mean);
    m4.add(d2 * d2);
  }
  const double fourth = m4.value() / n;
  VarianceEstimate out;
  out.count = xs.size();
  out.variance = m.variance;
  out.std_error = std::sqrt(std::max(fourth - m.variance * m.variance, 0.0) / n);
  return out;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return xs[lo] + w * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("ks_distance_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = standard_normal_cdf(xs[i]);
    d = std::max(d, static_cast<double>(i + 1) / m - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / m);
  }
  return d;
}

double ks_critical_95(std::size_t m) {
  if (m == 0) throw std::invalid_argument("ks_critical_95: empty sample");
  return 1.36 / std::sqrt(static_cast<double>(m));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_line: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: x values are all equal");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  fit.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals[i] = r;
    sse += r * r;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
  }
  const double dof = n - 2.0;
  fit.slope_std_error = std::sqrt(sse / dof / sxx);
  const boost::math::students_t t_dist(dof);
  fit.half_width = boost::math::quantile(t_dist, 0.975) * fit.slope_std_error;
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

LineFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_log_log: length mismatch");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::domain_error("fit_log_log: values must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace cojump::stats
