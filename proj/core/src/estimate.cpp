#include "cojump/estimate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cojump/numeric.hpp"

namespace cojump {
namespace {

using numeric::Accumulator;
using numeric::DoubleDouble;

// Indicator 1{x^2 <= level}, non-strict.
bool kept(double x, double level) { return x * x <= level; }

DoubleDouble raise(DoubleDouble acc, double x, int power) {
  for (int i = 0; i < power; ++i) acc = numeric::mul(acc, x);
  return acc;
}

// Multiplies by h^(1 - (r+l)/2); integer exponents stay in double-double.
DoubleDouble scale_by_step(DoubleDouble value, double h, int r, int l) {
  const int twice_exponent = 2 - (r + l);
  if (twice_exponent % 2 == 0) {
    const int e = twice_exponent / 2;
    for (int i = 0; i < e; ++i) value = numeric::mul(value, h);
    for (int i = 0; i > e; --i) value = numeric::div(value, h);
    return value;
  }
  return numeric::mul(value, std::pow(h, 0.5 * twice_exponent));
}

void check_exponents(int r, int l) {
  if (r < 0 || l < 0) throw std::invalid_argument("threshold_stat: exponents must be >= 0");
}

void check_levels(TruncationLevels levels) {
  if (std::isnan(levels.first) || std::isnan(levels.second) || levels.first < 0.0 ||
      levels.second < 0.0) {
    throw std::invalid_argument("truncation level must be >= 0");
  }
}

DoubleDouble threshold_sum(const IncrementPair& inc, int r, int l, TruncationLevels levels) {
  check_exponents(r, l);
  check_levels(levels);
  const auto x = inc.first();
  const auto y = inc.second();
  Accumulator acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!kept(x[j], levels.first) || !kept(y[j], levels.second)) continue;
    acc.add(raise(raise(DoubleDouble{1.0, 0.0}, x[j], r), y[j], l));
  }
  return scale_by_step(acc.exact(), inc.step(), r, l);
}

DoubleDouble adjacent_sum(const IncrementPair& inc, TruncationLevels levels) {
  check_levels(levels);
  const auto x = inc.first();
  const auto y = inc.second();
  if (x.size() < 2) throw std::invalid_argument("adjacent_stat: needs at least 2 increments");
  Accumulator acc;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    if (!kept(x[j], levels.first) || !kept(x[j + 1], levels.first) ||
        !kept(y[j], levels.second) || !kept(y[j + 1], levels.second)) {
      continue;
    }
    DoubleDouble term = numeric::two_prod(x[j], x[j + 1]);
    term = numeric::mul(term, y[j]);
    term = numeric::mul(term, y[j + 1]);
    acc.add(term);
  }
  return numeric::div(acc.exact(), inc.step());
}

// Cross products of the steps that v11 leaves out. With the kept ones they
// partition the realized covariation, so no subtraction is needed.
DoubleDouble dropped_cross_sum(const IncrementPair& inc, TruncationLevels levels) {
  check_levels(levels);
  const auto x = inc.first();
  const auto y = inc.second();
  Accumulator acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (kept(x[j], levels.first) && kept(y[j], levels.second)) continue;
    acc.add(numeric::two_prod(x[j], y[j]));
  }
  return acc.exact();
}

long double widen(const DoubleDouble& v) {
  return static_cast<long double>(v.hi) + static_cast<long double>(v.lo);
}

// One rounding at the end; the spread keeps its double-double tail.
std::optional<double> bias_quotient(const DoubleDouble& v11, const DoubleDouble& v22,
                                    const DoubleDouble& w, double truth, double h) {
  const long double spread = widen(numeric::add(v22, DoubleDouble{-w.hi, -w.lo}));
  if (!(spread > 0.0L)) return std::nullopt;
  const long double num = widen(numeric::add(v11, DoubleDouble{-truth, 0.0}));
  return static_cast<double>(num / (std::sqrt(static_cast<long double>(h)) * std::sqrt(spread)));
}

}  // namespace

IncrementPair::IncrementPair(double h, std::vector<double> dx1, std::vector<double> dx2)
    : h_(h), dx1_(std::move(dx1)), dx2_(std::move(dx2)) {
  if (!(h_ > 0.0) || !std::isfinite(h_)) {
    throw std::invalid_argument("increments: step h must be positive and finite");
  }
  if (dx1_.size() != dx2_.size()) {
    throw std::invalid_argument("increments: component lengths differ");
  }
}

TruncationLevels TruncationLevels::none() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf};
}

TruncationLevels TruncationLevels::from_rule(const ThresholdRule& rule, double h) {
  return shared(rule.level(h));
}

double realized_covariation(const IncrementPair& inc) {
  const auto x = inc.first();
  const auto y = inc.second();
  Accumulator acc;
  for (std::size_t j = 0; j < x.size(); ++j) acc.add(numeric::two_prod(x[j], y[j]));
  return acc.value();
}

double threshold_stat(const IncrementPair& inc, int r, int l, TruncationLevels levels) {
  return threshold_sum(inc, r, l, levels).value();
}

double threshold_stat(const IncrementPair& inc, int r, int l, const ThresholdRule& rule) {
  return threshold_stat(inc, r, l, TruncationLevels::from_rule(rule, inc.step()));
}

double adjacent_stat(const IncrementPair& inc, TruncationLevels levels) {
  return adjacent_sum(inc, levels).value();
}

double adjacent_stat(const IncrementPair& inc, const ThresholdRule& rule) {
  return adjacent_stat(inc, TruncationLevels::from_rule(rule, inc.step()));
}

CojumpEstimate cojump_estimates(const IncrementPair& inc, TruncationLevels levels) {
  check_levels(levels);
  CojumpEstimate out;
  out.sum = dropped_cross_sum(inc, levels).value();
  const auto x = inc.first();
  const auto y = inc.second();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!kept(x[j], levels.first) && !kept(y[j], levels.second)) {
      out.intervals.push_back({j + 1, x[j] * y[j]});
    }
  }
  return out;
}

CojumpEstimate cojump_estimates(const IncrementPair& inc, const ThresholdRule& rule) {
  return cojump_estimates(inc, TruncationLevels::from_rule(rule, inc.step()));
}

std::optional<double> normalized_bias(const IncrementPair& inc, TruncationLevels levels,
                                      double truth) {
  return bias_quotient(threshold_sum(inc, 1, 1, levels), threshold_sum(inc, 2, 2, levels),
                       adjacent_sum(inc, levels), truth, inc.step());
}

std::optional<double> normalized_bias(const IncrementPair& inc, const ThresholdRule& rule,
                                      double truth) {
  return normalized_bias(inc, TruncationLevels::from_rule(rule, inc.step()), truth);
}

EstimatorReport estimate_all(const IncrementPair& inc, TruncationLevels levels,
                             std::optional<double> truth) {
  EstimatorReport report;
  report.steps = inc.size();
  report.step = inc.step();
  report.threshold_used = levels;
  report.realized_cov = realized_covariation(inc);
  const DoubleDouble v11 = threshold_sum(inc, 1, 1, levels);
  const DoubleDouble v22 = threshold_sum(inc, 2, 2, levels);
  const DoubleDouble w = adjacent_sum(inc, levels);
  report.v11 = v11.value();
  report.v22 = v22.value();
  report.w = w.value();
  const CojumpEstimate cojumps = cojump_estimates(inc, levels);
  report.cojump_sum = cojumps.sum;
  report.cojump_intervals = cojumps.intervals;
  report.truth = truth;
  if (truth) {
    report.nb = bias_quotient(v11, v22, w, *truth, inc.step());
    report.nb_degenerate = !report.nb.has_value();
  }
  return report;
}

}  // namespace cojump
