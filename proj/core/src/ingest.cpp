#include "cojump/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "cojump/csv_io.hpp"

namespace cojump {
namespace {

std::vector<double> sample_previous_tick(const TickSeries& s, double start, double span,
                                         std::size_t n, double end) {
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = k == n ? end : start + static_cast<double>(k) * (span / static_cast<double>(n));
    // Last tick at or before t; t >= start >= first timestamp.
    const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
    out[k] = s.prices[static_cast<std::size_t>(it - s.times.begin()) - 1];
  }
  return out;
}

}  // namespace

void TickSeries::validate() const {
  if (times.size() != prices.size()) throw DataError("tick series: length mismatch");
  if (times.size() < 2) throw DataError("tick series: need at least 2 ticks");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DataError("tick series: non-finite timestamp");
    if (i > 0 && times[i] < times[i - 1]) {
      throw DataError(fmt::format("tick series: timestamp decreases at row {}", i + 1));
    }
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
      throw DataError(fmt::format("tick series: non-positive price {} at row {}", prices[i], i + 1));
    }
  }
}

IncrementPair ingest_and_align(const TickSeries& a, const TickSeries& b, std::size_t n,
                               const AlignOptions& options) {
  a.validate();
  b.validate();
  if (n < 2) throw std::invalid_argument("ingest: grid needs n >= 2");
  if (!(options.time_unit > 0.0)) throw std::invalid_argument("ingest: time unit must be positive");
  const double start = std::max(a.times.front(), b.times.front());
  const double end = std::min(a.times.back(), b.times.back());
  if (!(end > start)) {
    throw DataError(fmt::format("ingest: empty time overlap [{}, {}]", start, end));
  }
  const double span = end - start;
  std::array<std::vector<double>, 2> level = {sample_previous_tick(a, start, span, n, end),
                                              sample_previous_tick(b, start, span, n, end)};
  std::array<std::vector<double>, 2> dx;
  for (int q = 0; q < 2; ++q) {
    if (options.scale == PriceScale::Log) {
      for (double& v : level[q]) v = std::log(v);
    }
    dx[q].resize(n);
    for (std::size_t k = 0; k < n; ++k) dx[q][k] = level[q][k + 1] - level[q][k];
  }
  const double h = span / static_cast<double>(n) * options.time_unit;
  return IncrementPair(h, std::move(dx[0]), std::move(dx[1]));
}

TickSeries ticks_from_csv(const std::string& text) {
  TickSeries s;
  std::istringstream in(text);
  std::size_t row = 0;
  for (std::string line; std::getline(in, line);) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(fmt::format("ticks CSV line {}: need time,price", row));
    const std::string t = line.substr(0, comma);
    const std::string p = line.substr(comma + 1);
    if (s.times.empty() && t == "time") continue;
    try {
      s.times.push_back(parse_number(t));
      s.prices.push_back(parse_number(p));
    } catch (const DataError& e) {
      throw DataError(fmt::format("ticks CSV line {}: {}", row, e.what()));
    }
  }
  return s;
}

}  // namespace cojump
