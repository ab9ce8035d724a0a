#pragma once

#include <span>
#include <vector>

namespace samplenet::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance (n-1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> xs);
/// Standard error of the mean, sqrt(sample_variance / n).
double standard_error(std::span<const double> xs);
/// Linear-interpolation quantile (R type 7). `level` in [0, 1].
double quantile(std::vector<double> xs, double level);
double median(std::vector<double> xs);
double normal_cdf(double x);

struct QuantileSet {
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

QuantileSet quantiles(const std::vector<double>& xs);

}  // namespace samplenet::stats
