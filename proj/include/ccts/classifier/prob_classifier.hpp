#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccts/core/series.hpp"

namespace ccts {

inline constexpr double kDefaultProbClamp = 1e-6;

// Clamp to [eps, 1 - eps].
double clamp_probability(double p, double eps = kDefaultProbClamp);

// The fixed classifier under explanation: maps a series to the probability of
// the target class. Implementations are deterministic, reentrant, and return
// values already clamped to [eps, 1 - eps].
class ProbClassifier {
 public:
  virtual ~ProbClassifier() = default;
  virtual double classify(const MultivariateSeries& x) const = 0;
  virtual std::string name() const = 0;
  virtual std::string fingerprint() const { return name(); }
};

inline double classify(const ProbClassifier& m, const MultivariateSeries& x) {
  return m.classify(x);
}

class ConstantClassifier final : public ProbClassifier {
 public:
  explicit ConstantClassifier(double p, double eps = kDefaultProbClamp);
  double classify(const MultivariateSeries&) const override { return p_; }
  std::string name() const override;

 private:
  double p_;
};

// Wraps an arbitrary callable; handy for tests and ad-hoc models.
class FunctionClassifier final : public ProbClassifier {
 public:
  FunctionClassifier(std::string name,
                     std::function<double(const MultivariateSeries&)> fn,
                     double eps = kDefaultProbClamp);
  double classify(const MultivariateSeries& x) const override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::function<double(const MultivariateSeries&)> fn_;
  double eps_;
};

// Classifier whose output depends on the input only through a projection
// z = W vec(X) with at most two rows: f(X) = clamp(link(z)). Exposing W lets
// exact oracles integrate f against Gaussian segment distributions.
class ProjectedClassifier : public ProbClassifier {
 public:
  // Each row has n_channels * n_timesteps weights, channel-major.
  ProjectedClassifier(std::size_t n_channels, std::size_t n_timesteps,
                      std::vector<std::vector<double>> rows,
                      double eps = kDefaultProbClamp);

  double classify(const MultivariateSeries& x) const final;

  // Unclamped probability as a function of the projection.
  virtual double link(std::span<const double> z) const = 0;

  std::vector<double> project(const MultivariateSeries& x) const;
  const std::vector<std::vector<double>>& projection() const noexcept {
    return rows_;
  }
  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_timesteps() const noexcept { return n_timesteps_; }
  double clamp_eps() const noexcept { return eps_; }

 private:
  std::size_t n_channels_;
  std::size_t n_timesteps_;
  std::vector<std::vector<double>> rows_;
  double eps_;
};

// f(X) = sigmoid(bias + sum_i coef_i z_i).
class LogisticProjectionClassifier final : public ProjectedClassifier {
 public:
  LogisticProjectionClassifier(std::size_t n_channels, std::size_t n_timesteps,
                               std::vector<std::vector<double>> rows,
                               std::vector<double> coef, double bias,
                               double eps = kDefaultProbClamp);
  double link(std::span<const double> z) const override;
  std::string name() const override { return "logistic-projection"; }

 private:
  std::vector<double> coef_;
  double bias_;
};

}  // namespace ccts
