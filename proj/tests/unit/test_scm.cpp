#include <gtest/gtest.h>

#include <cmath>

#include "ccts/attribution/effects.hpp"
#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"
#include "ccts/scm/bayes.hpp"
#include "ccts/scm/generator.hpp"
#include "ccts/scm/imputers.hpp"
#include "ccts/scm/oracle.hpp"

namespace ccts::scm {
namespace {

SCMConfig linear(double a, double b, double w = 0.0) {
  SCMConfig c;
  c.n_channels = 1;
  c.n_timesteps = 8;
  c.n_concepts = 2;
  c.disease.weight = w;
  c.linear = {{{a}, {b}, {1.0}}, {{0.5}, {b}, {1.0}}};
  c.validate();
  return c;
}

SCMConfig discrete() {
  SCMConfig c;
  c.family = Family::kDiscrete;
  c.n_channels = 1;
  c.n_timesteps = 6;
  c.n_concepts = 2;
  c.discrete = {{{{-1}, {0}, {1}}, {0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}},
                {{{-1}, {1}}, {0.5, 0.5}, {0.5, 0.5}}};
  c.validate();
  return c;
}

TEST(Config, ValidationErrors) {
  auto c = linear(1, 0);
  c.n_concepts = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  auto d = discrete();
  d.discrete[0].p_d0 = {0.5, 0.6, 0.1};
  EXPECT_THROW(d.validate(), ConfigError);
  auto e = linear(1, 0);
  e.linear[0].sigma = {-1};
  EXPECT_THROW(e.validate(), ConfigError);
}

TEST(Config, JsonRoundTripAndScalarBroadcast) {
  const auto c = discrete();
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
  const auto j = nlohmann::json::parse(R"({
    "n_channels": 2, "n_timesteps": 8, "n_concepts": 1,
    "disease": {"bias": 0, "weight": 0, "sigma_d": 1, "sigma_s": 1},
    "mask": {"n_segments": 0, "jitter": 0},
    "family": "linear-gaussian", "sigma_x": 0,
    "concepts": [{"a": 0.5, "b": 0, "sigma": 1}]})");
  const auto l = config_from_json(j);
  EXPECT_EQ(l.linear[0].a, (std::vector<double>{0.5, 0.5}));
}

TEST(Generator, ReproducibleWithFixedSplits) {
  const auto c = linear(1, 0.5);
  const auto a = generate_dataset(c, 100, 7), b = generate_dataset(c, 100, 7);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == generate_dataset(c, 100, 8));
  EXPECT_EQ(a.indices(Split::kTrain).size(), 60u);
  EXPECT_EQ(a.indices(Split::kValidation).size(), 20u);
  EXPECT_EQ(a.indices(Split::kTest).size(), 20u);
  EXPECT_EQ(a[0].sample_id, "s000000");
  EXPECT_THROW(generate_dataset(c, 0, 1), ConfigError);
}

TEST(Generator, MaskJitterKeepsSegmentsNonEmpty) {
  auto c = linear(1, 0);
  c.n_timesteps = 12;
  c.mask = {6, 3.0};
  auto r = rng_stream(1, "mask");
  for (int i = 0; i < 200; ++i) {
    const auto m = draw_mask(c, r);
    EXPECT_TRUE(m.contains(1));
    EXPECT_TRUE(m.contains(2));
  }
}

TEST(Generator, ClassConditionalMeans) {
  const auto c = linear(1.5, 0);
  const auto d = generate_dataset(c, 4000, 2);
  double s1 = 0, s0 = 0;
  int n1 = 0, n0 = 0;
  for (const auto& s : d.samples()) {
    const double v = s.series.at(0, 0);
    if (s.label == ClassLabel::kTarget) {
      s1 += v;
      ++n1;
    } else {
      s0 += v;
      ++n0;
    }
  }
  EXPECT_NEAR(s1 / n1, 1.5, 0.06);
  EXPECT_NEAR(s0 / n0, 0.0, 0.06);
  EXPECT_NEAR(static_cast<double>(n1) / d.size(), 0.5, 0.03);
}

TEST(Bayes, DisjointLinearPosteriorHasClosedForm) {
  // b = 0 and w = 0: log-odds = sum_i (a_i x_i - a_i^2 / 2).
  const auto gt = make_ground_truth(linear(1.0, 0.0));
  const auto f = bayes_classifier(gt);
  const auto d = generate_dataset(gt.config, 10, 1);
  for (const auto& s : d.samples()) {
    double lo = 0;
    for (std::size_t t = 0; t < 8; ++t) {
      const double a = gt.mask.label(0, t) == 1 ? 1.0 : 0.5;
      lo += a * s.series.at(0, t) - a * a / 2;
    }
    EXPECT_NEAR(f->classify(s.series), clamp_probability(sigmoid(lo)), 1e-12);
  }
}

TEST(Bayes, DiscretePosterior) {
  const auto gt = make_ground_truth(discrete());
  const auto f = bayes_classifier(gt);
  const std::vector<double> p0 = {0.6, 0.3, 0.1}, p1 = {0.1, 0.3, 0.6};
  const std::vector<double> lv = {-1, 0, 1};
  for (int j = 0; j < 3; ++j) {
    std::vector<double> v(6, 1.0);
    for (std::size_t t = 0; t < 6; ++t) {
      if (gt.mask.label(0, t) == 1) v[t] = lv[static_cast<std::size_t>(j)];
    }
    EXPECT_NEAR(f->classify(MultivariateSeries(1, 6, v)), p1[j] / (p0[j] + p1[j]), 1e-12);
  }
  EXPECT_DOUBLE_EQ(gt.prior, 0.5);
}

TEST(Bayes, PriorWithLatentWeight) {
  DiseaseMechanism dm{0.4, 0.0, 1.0, 1.0};
  EXPECT_NEAR(disease_prior(dm), sigmoid(0.4), 1e-12);
  dm.weight = 2.0;
  // E[sigmoid(0.4 + 2 Z)] by independent quadrature.
  EXPECT_NEAR(disease_prior(dm),
              gaussian_expectation([](double z) { return sigmoid(0.4 + 2 * z); }, 0, 1), 1e-9);
}

TEST(Imputers, InterventionalIgnoresComplement) {
  const auto gt = make_ground_truth(linear(2.0, 0.5));
  const InterventionalImputer one(gt, ClassLabel::kTarget);
  const auto d = generate_dataset(gt.config, 2, 1);
  const auto idx = segment_index(d[0].mask, 1);
  auto r1 = rng_stream(1, "i"), r2 = rng_stream(1, "i");
  EXPECT_EQ(one.impute(d[0], idx, r1), one.impute(d[1], idx, r2));
  double s = 0;
  auto r = rng_stream(2, "i");
  for (int i = 0; i < 5000; ++i) s += one.impute(d[0], idx, r)[0];
  EXPECT_NEAR(s / 5000, 2.0, 0.05);
}

TEST(Imputers, ConditionalPosteriorMatchesBayesOnComplement) {
  const auto gt = make_ground_truth(discrete());
  const ConditionalImputer cond(gt);
  const auto d = generate_dataset(gt.config, 5, 3);
  const auto f = bayes_classifier(gt);
  // Concept 2 is uninformative, so removing it leaves the posterior unchanged.
  for (const auto& s : d.samples()) {
    EXPECT_NEAR(cond.posterior_target(s, segment_index(s.mask, 2)), f->classify(s.series),
                1e-9);
  }
}

TEST(Oracle, LinearMatchesLongMonteCarlo) {
  const auto gt = make_ground_truth(linear(0.8, 0.6));
  const auto f = bayes_classifier(gt);
  const InterventionalImputer t(gt, ClassLabel::kTarget), b(gt, ClassLabel::kBaseline);
  const ConditionalImputer cond(gt);
  const auto d = generate_dataset(gt.config, 6, 4);
  attribution::EngineConfig cfg;
  cfg.n_imputations = 20000;
  cfg.stderr_resamples = 50;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto ex = brute_force_effects(gt, d[i], *f, 1);
    const auto e = attribution::ite(d[i], *f, 1, t, b, cfg, rng_stream(9, d[i].sample_id));
    const auto a = attribution::iaa(d[i], *f, 1, cond, cfg, rng_stream(8, d[i].sample_id));
    EXPECT_NEAR(e->value, ex.ite, 4 * e->std_error + 1e-12);
    EXPECT_NEAR(a->value, ex.iaa, 4 * a->std_error + 1e-12);
    EXPECT_NEAR(ex.f_observed, f->classify(d[i].series), 1e-12);
  }
}

TEST(Oracle, DiscreteEnumerationByHand) {
  const auto gt = make_ground_truth(discrete());
  const auto f = bayes_classifier(gt);
  const auto d = generate_dataset(gt.config, 1, 1);
  const auto ex = brute_force_effects(gt, d[0], *f, 1);
  // Under do(D = d) concept 1 takes level j with p_d[j]; f is p1/(p0 + p1).
  const std::vector<double> p0 = {0.6, 0.3, 0.1}, p1 = {0.1, 0.3, 0.6};
  double mt = 0, mb = 0;
  for (int j = 0; j < 3; ++j) {
    const double fj = p1[j] / (p0[j] + p1[j]);
    mt += p1[j] * fj;
    mb += p0[j] * fj;
  }
  EXPECT_NEAR(ex.mean_target, mt, 1e-12);
  EXPECT_NEAR(ex.mean_baseline, mb, 1e-12);
  EXPECT_NEAR(ex.ite, std::log2(mt / mb), 1e-12);
  EXPECT_NEAR(brute_force_effects(gt, d[0], *f, 2).ite, 0.0, 1e-12);
}

TEST(Oracle, RejectsNonProjectedClassifierOnLinearFamily) {
  const auto gt = make_ground_truth(linear(1, 0));
  const auto d = generate_dataset(gt.config, 1, 1);
  EXPECT_THROW(brute_force_effects(gt, d[0], ConstantClassifier(0.5), 1), UnsupportedError);
}

}  // namespace
}  // namespace ccts::scm
