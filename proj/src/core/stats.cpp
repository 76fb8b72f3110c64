#include "ccts/core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ccts/core/error.hpp"

namespace ccts {

double mean(std::span<const double> x) {
  if (x.empty()) throw DataError("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double population_variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
  return std::sqrt(population_variance(x));
}

double sample_std(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
  if (x.empty()) throw DataError("median of empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DataError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DataError("quantile level outside [0, 1]");
  std::sort(x.begin(), x.end());
  const double h = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = h - static_cast<double>(lo);
  // Equal neighbours return the value itself, not a rounded interpolation.
  if (x[lo] == x[hi]) return x[lo];
  return x[lo] + frac * (x[hi] - x[lo]);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace ccts
