#pragma once

#include <cstddef>
#include <vector>

namespace ccts::discovery {

// Depth-1 regression tree on one feature. Rows with a missing (NaN) feature
// follow `missing_left`.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0;  // x < threshold goes left
  bool missing_left = true;
  double left = 0, right = 0;
};

struct StumpsOptions {
  std::size_t rounds = 200;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf values
};

// Gradient-boosted stumps under logistic loss with Newton leaf values
// -G / (H + lambda). The initial margin is the train log-odds.
class BoostedStumps {
 public:
  // `X` is row-major n x n_features; NaN marks a missing value.
  static BoostedStumps fit(const std::vector<double>& X, std::size_t n_features,
                           const std::vector<int>& y, const StumpsOptions& opts = {});

  double margin(const double* row) const;
  double predict_proba(const double* row) const;
  std::vector<double> predict_proba(const std::vector<double>& X) const;

  const std::vector<Stump>& stumps() const noexcept { return stumps_; }
  double base_margin() const noexcept { return base_; }

 private:
  std::size_t n_features_ = 0;
  double base_ = 0;
  double lr_ = 0.1;
  std::vector<Stump> stumps_;
};

}  // namespace ccts::discovery
