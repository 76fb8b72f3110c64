#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "ccts/core/error.hpp"
#include "ccts/imputer/denoiser.hpp"
#include "ccts/imputer/diffusion.hpp"
#include "ccts/imputer/donor.hpp"
#include "ccts/scm/generator.hpp"

namespace ccts::imputer {
namespace {

TEST(Schedule, FrozenAlphaBar) {
  // numpy: cumprod(1 - linspace(1e-4, 0.02, 200)).
  const auto s = DiffusionSchedule::linear();
  EXPECT_EQ(s.T(), 200u);
  EXPECT_NEAR(s.alpha_bar(1), 0.9999, 1e-15);
  EXPECT_NEAR(s.alpha_bar(100), 0.6024803053077055, 1e-13);
  EXPECT_NEAR(s.alpha_bar(200), 0.13218275425061793, 1e-13);
  EXPECT_DOUBLE_EQ(s.beta(200), 0.02);
  EXPECT_EQ(s.posterior_variance(1), 0.0);
}

TEST(Schedule, ForwardReverseConsistency) {
  const auto s = DiffusionSchedule::linear();
  const double x0 = 0.7, eps = -1.3;
  for (std::size_t t : {1u, 50u, 200u}) {
    const double xt = s.forward(x0, t, eps);
    EXPECT_NEAR(xt, std::sqrt(s.alpha_bar(t)) * x0 + std::sqrt(1 - s.alpha_bar(t)) * eps, 1e-15);
  }
  // With the exact noise at t = 1 the deterministic reverse step recovers x0.
  EXPECT_NEAR(s.reverse(s.forward(x0, 1, eps), eps, 1, 0.0), x0, 1e-12);
}

DenoiserModel small_model(std::uint64_t seed = 1) {
  auto r = rng_stream(seed, "init");
  auto m = init_denoiser(2, 6, 2, 8, 200, 1e-4, 0.02, r);
  m.channel_mean = {0.0, 0.0};
  m.channel_scale = {1.0, 1.0};
  // Non-zero biases so that the gradient check exercises every block.
  for (auto& p : m.params) p += 0.05 * r.normal();
  return m;
}

TEST(Denoiser, ParamCountAndFeatureWidth) {
  const auto m = small_model();
  EXPECT_EQ(m.params.size(), m.param_count());
  EXPECT_EQ(m.input_dim(), 5u * 2 * kFeaturesPerPosition + kStepEmbedding + 2);
}

TEST(Denoiser, GradientMatchesFiniteDifference) {
  auto m = small_model();
  const std::vector<double> state = {0.3, -1.0, 0.5, 2.0, -0.2, 0.1, 1.1, 0.4, -0.7, 0.0, 0.9, -1.5};
  const std::vector<std::uint8_t> masked = {0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0};
  const std::size_t col = 2, step = 37;
  const double abar = DiffusionSchedule::linear().alpha_bar(step);
  DenoiserWorkspace ws;
  ws.resize(m);
  const auto loss = [&](DenoiserModel& mm) {
    denoiser_features(mm, state, masked, col, step, abar, ws);
    denoiser_forward(mm, ws);
    double l = 0;
    for (double o : ws.out) l += 0.5 * o * o;
    return l;
  };
  loss(m);
  const std::vector<double> dout = ws.out;
  std::vector<double> grad(m.params.size(), 0.0);
  denoiser_backward(m, ws, dout, grad);
  auto r = rng_stream(2, "pick");
  for (int k = 0; k < 60; ++k) {
    const std::size_t i = r.uniform_index(m.params.size());
    const double h = 1e-6, keep = m.params[i];
    m.params[i] = keep + h;
    const double lp = loss(m);
    m.params[i] = keep - h;
    const double lm = loss(m);
    m.params[i] = keep;
    EXPECT_NEAR(grad[i], (lp - lm) / (2 * h), 1e-6 * (1 + std::abs(grad[i]))) << "param " << i;
  }
}

TEST(Denoiser, CheckpointRoundTripAndCorruption) {
  auto m = small_model();
  m.label = ClassLabel::kTarget;
  m.mask_mode = MaskMode::kBlackout;
  m.channel_mean = {1.5, -2};
  m.selected_iter = 40;
  std::stringstream ss;
  write_denoiser(m, ss);
  const auto back = read_denoiser(ss);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.label, m.label);
  EXPECT_EQ(back.mask_mode, m.mask_mode);
  EXPECT_EQ(back.channel_mean, m.channel_mean);
  EXPECT_EQ(back.selected_iter, 40u);

  std::stringstream bad;
  write_denoiser(m, bad);
  std::string bytes = bad.str();
  bytes[0] = 'X';
  std::stringstream corrupt(bytes);
  EXPECT_THROW(read_denoiser(corrupt), ParseError);
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2).replace(0, 1, "C"));
  EXPECT_THROW(read_denoiser(truncated), Error);
  EXPECT_THROW(load_denoiser("/nonexistent/model.ddpm"), IoError);
}

LabeledSample ramp(std::size_t nc, std::size_t nt) {
  std::vector<double> v(nc * nt);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  std::vector<int> lab(nt);
  for (std::size_t t = 0; t < nt; ++t) lab[t] = t < nt / 2 ? 1 : 2;
  return {MultivariateSeries(nc, nt, v), ConceptMask::per_timestep(lab, nc, 2),
          ClassLabel::kBaseline, "r"};
}

TEST(TrainingMask, BlackoutCoversAllChannelsOverAWindow) {
  const auto s = ramp(3, 20);
  auto r = rng_stream(1, "mask");
  for (int i = 0; i < 100; ++i) {
    const auto idx = sample_training_mask(s, MaskMode::kBlackout, r);
    ASSERT_EQ(idx.size() % 3, 0u);
    const std::size_t len = idx.size() / 3;
    EXPECT_GE(len, 2u);
    EXPECT_LE(len, 8u);
    EXPECT_EQ(idx[0].timestep + len - 1, idx[len - 1].timestep);
  }
  const auto c = sample_training_mask(s, MaskMode::kConceptRegions, r);
  EXPECT_TRUE(c == segment_index(s.mask, 1) || c == segment_index(s.mask, 2));
}

TEST(Ddpm, ImputationIgnoresMaskedValuesAndIsReproducible) {
  scm::SCMConfig cfg;
  cfg.n_channels = 2;
  cfg.n_timesteps = 12;
  cfg.n_concepts = 2;
  cfg.linear = {{{1.0, 1.0}, {0.5, 0.5}, {1.0, 1.0}}, {{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}};
  const auto d = scm::generate_dataset(cfg, 60, 1);
  DdpmTrainOptions o;
  o.iters = 40;
  o.hidden = 8;
  o.radius = 2;
  o.checkpoint_every = 20;
  o.validation_samples = 8;
  const auto sched = DiffusionSchedule::linear();
  const auto res = ddpm_train(d, sched, ClassLabel::kTarget, MaskMode::kBlackout, o);
  EXPECT_EQ(res.loss_history.size(), 40u);
  EXPECT_EQ(res.validation_history.size(), 2u);
  EXPECT_EQ(res.model.label, ClassLabel::kTarget);
  const auto again = ddpm_train(d, sched, ClassLabel::kTarget, MaskMode::kBlackout, o);
  EXPECT_EQ(again.model.params, res.model.params);

  const auto& s = d[0];
  const auto idx = segment_index(s.mask, 1);
  auto poisoned = s;
  poisoned.series = splice(s.series, idx, std::vector<double>(idx.size(), 1e6));
  auto r1 = rng_stream(1, "imp"), r2 = rng_stream(1, "imp");
  const auto a = ddpm_impute(res.model, sched, s, idx, r1);
  EXPECT_EQ(a, ddpm_impute(res.model, sched, poisoned, idx, r2));
  for (double v : a) EXPECT_TRUE(std::isfinite(v));

  const DiffusionImputer imp(std::make_shared<DenoiserModel>(res.model), sched);
  EXPECT_TRUE(imp.blackout_capable());
  EXPECT_EQ(imp.conditioning(), Conditioning::kClassSpecific);
}

TEST(Donor, CopiesValuesFromSameClassTrainDonors) {
  const auto a = ramp(1, 8);
  auto b = a;
  b.sample_id = "b";
  b.label = ClassLabel::kTarget;
  b.series = MultivariateSeries(1, 8, std::vector<double>(8, -1.0));
  const Dataset d({a, b}, {Split::kTrain, Split::kTrain});
  const DonorImputer imp(donor_fit(d, ClassLabel::kTarget));
  auto r = rng_stream(1, "donor");
  const auto idx = segment_index(a.mask, 2);
  EXPECT_EQ(imp.impute(a, idx, r), std::vector<double>(idx.size(), -1.0));
  const Dataset only_test({a}, {Split::kTest});
  EXPECT_THROW(donor_fit(only_test, std::nullopt), DataError);
}

TEST(Donor, NearestTimestepWhenMasksDiffer) {
  auto donor = ramp(1, 8);  // concept 1 at t 0..3, values 0..7
  donor.mask = ConceptMask::per_timestep({1, 1, 2, 2, 2, 2, 2, 2}, 1, 2);
  const Dataset d({donor}, {Split::kTrain});
  auto target = ramp(1, 8);
  target.sample_id = "t";
  const DonorImputer imp(donor_fit(d, std::nullopt));
  auto r = rng_stream(1, "donor");
  // Target concept-1 positions 0..3 map to donor 0, 1, 1, 1.
  EXPECT_EQ(imp.impute(target, segment_index(target.mask, 1), r),
            (std::vector<double>{0, 1, 1, 1}));
}

}  // namespace
}  // namespace ccts::imputer
