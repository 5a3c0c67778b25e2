#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tscale::stats {

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean with standard error s / sqrt(n) (Welford accumulation).
MeanEstimate mean_estimate(std::span<const double> xs);

/// |estimate − target| / se, with 0/0 read as 0 and x/0 as +inf.
double z_score(double estimate, double target, double standard_error);

double normal_cdf(double x);

/// Two-sided one-sample Kolmogorov-Smirnov statistic against N(0, 1).
double ks_statistic_normal(std::vector<double> samples);

/// Asymptotic 1% critical value 1.63 / sqrt(n).
double ks_critical_value_1pct(std::size_t n);

}  // namespace tscale::stats
