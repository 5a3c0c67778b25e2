#include "tscale/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tscale::stats {

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate e;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  e.count = n;
  e.mean = mean;
  if (n > 1) e.standard_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return e;
}

double z_score(double estimate, double target, double standard_error) {
  const double dev = std::abs(estimate - target);
  if (standard_error > 0.0) return dev / standard_error;
  return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double ks_critical_value_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

}  // namespace tscale::stats
