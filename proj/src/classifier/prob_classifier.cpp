#include "ccts/classifier/prob_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"

namespace ccts {

double clamp_probability(double p, double eps) {
  if (std::isnan(p)) throw DataError("classifier produced NaN");
  return std::clamp(p, eps, 1.0 - eps);
}

ConstantClassifier::ConstantClassifier(double p, double eps)
    : p_(clamp_probability(p, eps)) {}

std::string ConstantClassifier::name() const {
  return "constant(" + std::to_string(p_) + ")";
}

FunctionClassifier::FunctionClassifier(
    std::string name, std::function<double(const MultivariateSeries&)> fn,
    double eps)
    : name_(std::move(name)), fn_(std::move(fn)), eps_(eps) {}

double FunctionClassifier::classify(const MultivariateSeries& x) const {
  return clamp_probability(fn_(x), eps_);
}

ProjectedClassifier::ProjectedClassifier(std::size_t n_channels,
                                         std::size_t n_timesteps,
                                         std::vector<std::vector<double>> rows,
                                         double eps)
    : n_channels_(n_channels),
      n_timesteps_(n_timesteps),
      rows_(std::move(rows)),
      eps_(eps) {
  if (rows_.size() > 2) throw ConfigError("projection rank must be <= 2");
  for (const auto& r : rows_) {
    if (r.size() != n_channels_ * n_timesteps_) {
      throw ShapeError("projection row length does not match series shape");
    }
  }
}

std::vector<double> ProjectedClassifier::project(const MultivariateSeries& x) const {
  if (x.n_channels() != n_channels_ || x.n_timesteps() != n_timesteps_) {
    throw ShapeError("classifier expects " + std::to_string(n_channels_) + "x" +
                     std::to_string(n_timesteps_) + " input, got " +
                     std::to_string(x.n_channels()) + "x" +
                     std::to_string(x.n_timesteps()));
  }
  std::vector<double> z(rows_.size(), 0.0);
  const auto v = x.values();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += rows_[r][i] * v[i];
    z[r] = s;
  }
  return z;
}

double ProjectedClassifier::classify(const MultivariateSeries& x) const {
  const auto z = project(x);
  return clamp_probability(link(z), eps_);
}

LogisticProjectionClassifier::LogisticProjectionClassifier(
    std::size_t n_channels, std::size_t n_timesteps,
    std::vector<std::vector<double>> rows, std::vector<double> coef, double bias,
    double eps)
    : ProjectedClassifier(n_channels, n_timesteps, std::move(rows), eps),
      coef_(std::move(coef)),
      bias_(bias) {
  if (coef_.size() != rank()) throw ConfigError("one coefficient per projection row");
}

double LogisticProjectionClassifier::link(std::span<const double> z) const {
  double s = bias_;
  for (std::size_t i = 0; i < z.size(); ++i) s += coef_[i] * z[i];
  return sigmoid(s);
}

}  // namespace ccts
