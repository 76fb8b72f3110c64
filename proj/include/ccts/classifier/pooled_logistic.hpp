#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccts/classifier/prob_classifier.hpp"
#include "ccts/core/dataset.hpp"
#include "json.hpp"

namespace ccts::classifier {

// Pooled summary features: per channel (mean, std, min, max), then the same
// four statistics over all values.
std::vector<double> pooled_features(const MultivariateSeries& x);
std::vector<std::string> pooled_feature_names(
    const std::vector<std::string>& channel_names);

// Logistic regression on standardized pooled features.
struct PooledLogisticModel {
  std::size_t n_channels = 0;
  std::size_t n_timesteps = 0;
  std::vector<std::string> feature_names;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  double clamp_eps = kDefaultProbClamp;
  std::string fingerprint;
  std::size_t selected_epoch = 0;
};

struct TrainOptions {
  double l2 = 1e-3;
  std::size_t epochs = 200;
  double lr = 0.1;
  std::uint64_t seed = 0;
};

// Full-batch gradient descent on the L2-regularised mean logistic loss over
// the train split. The returned weights are those of the epoch with the best
// validation AUROC (first on ties); without a usable validation split the
// last epoch is kept. Zero epochs yields all-zero weights. Throws DataError
// when the train split lacks a class.
PooledLogisticModel train_pooled_logistic(const Dataset& d,
                                          const TrainOptions& opts);

// Mean logistic loss plus (l2 / 2) * |w|^2 on already standardized rows.
double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<std::vector<double>>& rows,
                     std::span<const int> labels, double l2);
// Gradient of logistic_loss; the last entry is d/d bias.
std::vector<double> logistic_gradient(std::span<const double> weights, double bias,
                                      const std::vector<std::vector<double>>& rows,
                                      std::span<const int> labels, double l2);

class PooledLogisticClassifier final : public ProbClassifier {
 public:
  explicit PooledLogisticClassifier(PooledLogisticModel model);
  double classify(const MultivariateSeries& x) const override;
  std::string name() const override { return "pooled-logistic"; }
  std::string fingerprint() const override { return model_.fingerprint; }
  const PooledLogisticModel& model() const noexcept { return model_; }

 private:
  PooledLogisticModel model_;
};

nlohmann::json to_json(const PooledLogisticModel& m);
PooledLogisticModel pooled_logistic_from_json(const nlohmann::json& j);

}  // namespace ccts::classifier
