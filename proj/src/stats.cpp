#include "samplenet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace samplenet::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double quantile(std::vector<double> xs, double level) {
  if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (level < 0.0 || level > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = level * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

QuantileSet quantiles(const std::vector<double>& xs) {
  return {quantile(xs, 0.1), quantile(xs, 0.5), quantile(xs, 0.9)};
}

}  // namespace samplenet::stats
