#pragma once

#include <string>
#include <vector>

#include "cojump/estimate.hpp"

namespace cojump {

/// Irregular observations of one price. Timestamps are non-decreasing.
struct TickSeries {
  std::vector<double> times;
  std::vector<double> prices;

  /// Throws DataError: fewer than 2 ticks, decreasing time, non-positive price.
  void validate() const;
};

enum class PriceScale { Log, Raw };

struct AlignOptions {
  PriceScale scale = PriceScale::Log;
  /// Multiplies timestamp differences to give h, e.g. 1/(252*23400) for
  /// seconds to trading years.
  double time_unit = 1.0;
};

/// Previous-tick sampling onto t_k = start + k (end - start) / n over the
/// overlap [start, end] of both series, t_n = end. Returns the increments of
/// the sampled (log-)prices.
IncrementPair ingest_and_align(const TickSeries& a, const TickSeries& b, std::size_t n,
                               const AlignOptions& options = {});

/// "time,price" rows with an optional header line and '#' comments.
TickSeries ticks_from_csv(const std::string& text);

}  // namespace cojump
