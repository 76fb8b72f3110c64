#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace ccts::classifier {

// Probability that a random positive outscores a random negative; ties count
// one half. Labels are 0/1. Throws DataError unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct BootstrapInterval {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  // Resamples that contained a single class and were drawn again.
  std::size_t n_redrawn = 0;
};

using Metric = std::function<double(std::span<const double>, std::span<const int>)>;

// Percentile interval of `metric` over B resamples of (score, label) pairs
// drawn with replacement. Requires B >= 100 and 0 < level < 1.
BootstrapInterval bootstrap_metric(std::span<const double> scores,
                                   std::span<const int> labels, std::size_t B,
                                   double level, std::uint64_t seed,
                                   const Metric& metric = auroc);

}  // namespace ccts::classifier
