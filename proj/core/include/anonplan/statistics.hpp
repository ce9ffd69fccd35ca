#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace anonplan {

double mean(std::span<const double> values);

/// Linear-interpolation quantile (type 7) of unsorted data, p in [0, 1].
double quantile(std::span<const double> values, double p);

struct BoxStats {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double lo_whisker = 0.0;  ///< smallest value >= q1 - 1.5 IQR
  double hi_whisker = 0.0;  ///< largest value <= q3 + 1.5 IQR
};

BoxStats box_stats(std::span<const double> values);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Percentile bootstrap interval of the mean.
Interval bootstrap_mean_ci(std::span<const double> values, double level, std::size_t resamples, std::uint64_t seed);

}  // namespace anonplan
