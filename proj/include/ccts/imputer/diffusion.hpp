#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ccts/imputer/denoiser.hpp"
#include "ccts/imputer/segment_imputer.hpp"

namespace ccts::imputer {

// Linear beta schedule. Steps are 1-based: beta(1) = beta0, beta(T) = beta1.
class DiffusionSchedule {
 public:
  // Throws ConfigError unless T >= 1 and 0 < beta0 <= beta1 < 1.
  static DiffusionSchedule linear(std::size_t T = 200, double beta0 = 1e-4,
                                  double beta1 = 0.02);

  std::size_t T() const noexcept { return betas_.size(); }
  double beta0() const noexcept { return beta0_; }
  double beta1() const noexcept { return beta1_; }
  double beta(std::size_t t) const { return betas_.at(t - 1); }
  double alpha(std::size_t t) const { return 1.0 - betas_.at(t - 1); }
  double alpha_bar(std::size_t t) const { return alpha_bars_.at(t - 1); }
  // Variance of q(x_{t-1} | x_t, x_0); zero at t = 1.
  double posterior_variance(std::size_t t) const;

  // x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
  double forward(double x0, std::size_t t, double eps) const;
  // One ancestral step from x_t given the predicted noise; `z` is a standard
  // normal draw scaled by eta * sqrt(posterior variance). eta = 0 gives the
  // deterministic mean path.
  double reverse(double x_t, double eps_hat, std::size_t t, double z,
                 double eta = 1.0) const;

  bool compatible(const DenoiserModel& m) const;

 private:
  double beta0_ = 0;
  double beta1_ = 0;
  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

struct DdpmTrainOptions {
  std::size_t iters = 20000;
  double lr = 2e-4;
  std::size_t batch = 6;
  std::size_t checkpoint_every = 1000;
  std::size_t validation_samples = 64;
  std::size_t hidden = 128;
  std::size_t radius = 8;
  std::uint64_t seed = 0;
};

struct DdpmTrainResult {
  DenoiserModel model;                // parameters of the selected checkpoint
  std::vector<double> loss_history;   // mean batch loss per iteration
  std::vector<std::pair<std::size_t, double>> validation_history;
};

// Masked-noise training. Each iteration draws `batch` train samples (of
// `label_filter` when given), a training mask per sample, a step t uniform in
// [1, T], corrupts only masked positions and takes one Adam step on the mean
// squared noise-prediction error over masked positions. Every
// `checkpoint_every` iterations (and after the last) the validation loss is
// evaluated on a fixed corrupted validation set; the best checkpoint wins.
// Values are standardized per channel with train statistics.
// Throws DataError when the filtered train split is empty.
DdpmTrainResult ddpm_train(const Dataset& d, const DiffusionSchedule& schedule,
                           std::optional<ClassLabel> label_filter, MaskMode mode,
                           const DdpmTrainOptions& opts);

// Mean squared noise-prediction error on `samples`, each with one training
// mask, step and noise draw from `rng`.
double denoising_loss(const DenoiserModel& m, const DiffusionSchedule& schedule,
                      const std::vector<LabeledSample>& samples, RandomStream& rng);

// Refinement passes applied to the initial state before the reverse chain.
// With T = 200 and beta1 = 0.02, alpha_bar(T) is about 0.13, so x_T still
// carries 0.37 x_0; a pure N(0, 1) start would pull every imputation toward
// the channel mean. Each pass replaces x_T by
// sqrt(abar_T) x0_hat(x_T) + sqrt(1 - abar_T) z, whose fixed point has the
// context-dependent mean of q(x_T | observed).
inline constexpr std::size_t kTerminalRefinements = 16;

// Reverse diffusion from t = T to 1 over the positions of `idx`, observed
// positions held fixed. Throws ShapeError on a model/sample shape mismatch and
// ConfigError on a schedule mismatch.
std::vector<double> ddpm_impute(const DenoiserModel& m,
                                const DiffusionSchedule& schedule,
                                const LabeledSample& sample, const SegmentIndex& idx,
                                RandomStream& rng, double eta = 1.0,
                                std::size_t terminal_refinements = kTerminalRefinements);

// Forward-process corruption of the positions of `idx` at step t, in the
// model's standardized coordinates.
std::vector<double> forward_corrupt(const DenoiserModel& m,
                                    const DiffusionSchedule& schedule,
                                    const LabeledSample& sample,
                                    const SegmentIndex& idx, std::size_t t,
                                    RandomStream& rng);

class DiffusionImputer final : public SegmentImputer {
 public:
  DiffusionImputer(std::shared_ptr<const DenoiserModel> model,
                   DiffusionSchedule schedule, double eta = 1.0);
  std::vector<double> impute(const LabeledSample& sample, const SegmentIndex& idx,
                             RandomStream& rng) const override {
    return ddpm_impute(*model_, schedule_, sample, idx, rng, eta_);
  }
  Conditioning conditioning() const override {
    return model_->label ? Conditioning::kClassSpecific
                         : Conditioning::kUnconditional;
  }
  std::optional<ClassLabel> label() const override { return model_->label; }
  bool blackout_capable() const override {
    return model_->mask_mode == MaskMode::kBlackout;
  }
  std::string name() const override { return "ddpm"; }

 private:
  std::shared_ptr<const DenoiserModel> model_;
  DiffusionSchedule schedule_;
  double eta_;
};

}  // namespace ccts::imputer
