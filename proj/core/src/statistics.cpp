#include "anonplan/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anonplan/error.hpp"
#include "anonplan/random.hpp"

namespace anonplan {

double mean(std::span<const double> values) {
  if (values.empty()) throw Error("mean of no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace {

double sorted_quantile(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error("quantile of no values");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return sorted_quantile(s, p);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw Error("box statistics of no values");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxStats b;
  b.mean = mean(values);
  b.median = sorted_quantile(s, 0.5);
  b.q1 = sorted_quantile(s, 0.25);
  b.q3 = sorted_quantile(s, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * iqr;
  const double hi = b.q3 + 1.5 * iqr;
  b.lo_whisker = *std::lower_bound(s.begin(), s.end(), lo);
  b.hi_whisker = *(std::upper_bound(s.begin(), s.end(), hi) - 1);
  return b;
}

Interval bootstrap_mean_ci(std::span<const double> values, double level, std::size_t resamples, std::uint64_t seed) {
  if (values.empty() || resamples == 0) throw Error("bootstrap needs values and resamples");
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.below(values.size())];
    m = sum / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {sorted_quantile(means, tail), sorted_quantile(means, 1.0 - tail)};
}

}  // namespace anonplan
