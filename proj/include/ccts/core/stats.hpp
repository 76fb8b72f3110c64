#pragma once

#include <span>
#include <vector>

namespace ccts {

double mean(std::span<const double> x);
// Population variance / standard deviation (divide by n).
double population_variance(std::span<const double> x);
double population_std(std::span<const double> x);
// Sample standard deviation (divide by n - 1); 0 for n < 2.
double sample_std(std::span<const double> x);
// Midpoint of the two central order statistics for even n.
double median(std::vector<double> x);
// Linear-interpolation quantile (type 7) of an unsorted sample; q in [0, 1].
double quantile(std::vector<double> x, double q);

double sigmoid(double x);
double logit(double p);
double normal_cdf(double x);

}  // namespace ccts
