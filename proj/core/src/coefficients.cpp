#include "cojump/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cojump {
namespace {

double evaluate_table(const TabulatedPath& table, double t) {
  const auto& ts = table.times;
  const auto& vs = table.values;
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  // First node strictly after t.
  const auto upper = std::upper_bound(ts.begin(), ts.end(), t);
  const auto i = static_cast<std::size_t>(upper - ts.begin());
  if (table.mode == Interpolation::Step) return vs[i - 1];
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return vs[i - 1] + w * (vs[i] - vs[i - 1]);
}

void check_table(const TabulatedPath& table, const char* what) {
  if (table.times.empty() || table.times.size() != table.values.size()) {
    throw std::invalid_argument(std::string(what) + ": table needs matching non-empty columns");
  }
  for (std::size_t i = 1; i < table.times.size(); ++i) {
    if (!(table.times[i] > table.times[i - 1])) {
      throw std::invalid_argument(std::string(what) + ": table times must be increasing");
    }
  }
}

template <class Pred>
void check_values(const TimeFunction& f, Pred ok, const char* what) {
  if (const auto* c = std::get_if<ConstantPath>(&f)) {
    if (!ok(c->value)) throw std::invalid_argument(std::string(what) + ": value out of range");
    return;
  }
  const auto& table = std::get<TabulatedPath>(f);
  check_table(table, what);
  for (double v : table.values) {
    if (!ok(v)) throw std::invalid_argument(std::string(what) + ": table value out of range");
  }
}

}  // namespace

double evaluate(const TimeFunction& f, double t) {
  if (const auto* c = std::get_if<ConstantPath>(&f)) return c->value;
  return evaluate_table(std::get<TabulatedPath>(f), t);
}

void CoefficientSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  auto unit = [](double v) { return std::isfinite(v) && std::abs(v) <= 1.0; };

  for (const auto& a : drift) check_values(a, finite, "drift");
  for (const auto& v : vol) {
    if (const auto* cir = std::get_if<SquareRootVariance>(&v)) {
      if (!(cir->kappa >= 0.0) || !(cir->theta >= 0.0) || !(cir->xi >= 0.0) ||
          !(cir->v0 >= 0.0)) {
        throw std::invalid_argument("square-root variance: parameters must be >= 0");
      }
    } else if (const auto* c = std::get_if<ConstantPath>(&v)) {
      check_values(TimeFunction{*c}, nonneg, "volatility");
    } else {
      check_values(TimeFunction{std::get<TabulatedPath>(v)}, nonneg, "volatility");
    }
  }
  check_values(corr, unit, "correlation");
}

bool CoefficientSpec::deterministic() const {
  return std::none_of(vol.begin(), vol.end(), [](const VolatilitySpec& v) {
    return std::holds_alternative<SquareRootVariance>(v);
  });
}

bool CoefficientSpec::volatility_identically_zero() const {
  return std::all_of(vol.begin(), vol.end(), [](const VolatilitySpec& v) {
    const auto* c = std::get_if<ConstantPath>(&v);
    return c != nullptr && c->value == 0.0;
  });
}

}  // namespace cojump
