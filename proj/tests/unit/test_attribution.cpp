#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ccts/attribution/ate.hpp"
#include "ccts/attribution/effects.hpp"
#include "ccts/attribution/matrix.hpp"
#include "ccts/attribution/result_io.hpp"
#include "ccts/core/error.hpp"
#include "ccts/scm/bayes.hpp"
#include "ccts/scm/generator.hpp"
#include "ccts/scm/imputers.hpp"

namespace ccts::attribution {
namespace {

// Replacement values drawn around a fixed shift.
class ShiftImputer final : public SegmentImputer {
 public:
  ShiftImputer(std::optional<ClassLabel> l, double shift) : l_(l), shift_(shift) {}
  std::vector<double> impute(const LabeledSample&, const SegmentIndex& idx,
                             RandomStream& rng) const override {
    std::vector<double> v(idx.size());
    for (auto& x : v) x = shift_ + 0.1 * rng.normal();
    return v;
  }
  Conditioning conditioning() const override {
    return l_ ? Conditioning::kClassSpecific : Conditioning::kUnconditional;
  }
  std::optional<ClassLabel> label() const override { return l_; }
  bool blackout_capable() const override { return true; }
  std::string name() const override { return "shift"; }

 private:
  std::optional<ClassLabel> l_;
  double shift_;
};

LabeledSample two_channel() {
  return {MultivariateSeries(2, 4, {0, 0, 1, 1, 0, 0, 1, 1}),
          ConceptMask::per_channel({1, 1, 2, 2, 1, 2, 2, 2}, 2, 4, 2), ClassLabel::kTarget,
          "x"};
}

const LogisticProjectionClassifier& sum_classifier() {
  static const LogisticProjectionClassifier f(2, 4, {std::vector<double>(8, 1.0)}, {1.0}, -3.0);
  return f;
}

TEST(Summary, ConstantListGivesDegenerateInterval) {
  const std::vector<double> v(10, 0.25);
  const auto s = summarize_effects(v, 200, 0.95, rng_stream(1, "s"));
  EXPECT_DOUBLE_EQ(s.ate, 0.25);
  EXPECT_DOUBLE_EQ(s.low, 0.25);
  EXPECT_DOUBLE_EQ(s.high, 0.25);
  EXPECT_TRUE(s.significant);
  EXPECT_THROW(summarize_effects({}, 10, 0.95, rng_stream(1, "s")), DataError);
}

TEST(Summary, IntervalContainsMean) {
  const std::vector<double> v = {-5, 0.1, 0.2, 0.3, 0.1, 0.2, 0.15};
  const auto s = summarize_effects(v, 50, 0.5, rng_stream(2, "s"));
  EXPECT_LE(s.low, s.ate);
  EXPECT_GE(s.high, s.ate);
}

TEST(Effects, LogRatioOfMeansWithClamp) {
  EXPECT_DOUBLE_EQ(log2_mean_ratio(0.5, 0.25, 1e-6), 1.0);
  EXPECT_NEAR(log2_mean_ratio(0.0, 0.5, 1e-6), std::log2(1e-6 / 0.5), 1e-12);
}

TEST(Effects, SkipsAbsentConcept) {
  const auto s = two_channel();
  const ShiftImputer t(ClassLabel::kTarget, 1), b(ClassLabel::kBaseline, 0);
  EngineConfig cfg;
  auto wide = s;
  wide.mask = s.mask.with_n_concepts(3);
  EXPECT_FALSE(ite(wide, sum_classifier(), 3, t, b, cfg, rng_stream(1, "x")).has_value());
  auto ch0_only = s;
  ch0_only.mask = ConceptMask::per_channel({1, 1, 2, 2, 2, 2, 2, 2}, 2, 4, 2);
  EXPECT_FALSE(channel_effect(ch0_only, sum_classifier(), 1, 1, {&t, &b, nullptr},
                              EffectKind::kCausal, cfg, rng_stream(1, "x"))
                   .has_value());
}

TEST(Effects, ItePositiveForUpwardShift) {
  const auto s = two_channel();
  const ShiftImputer t(ClassLabel::kTarget, 1), b(ClassLabel::kBaseline, -1);
  EngineConfig cfg;
  cfg.n_imputations = 20;
  const auto e = ite(s, sum_classifier(), 2, t, b, cfg, rng_stream(1, "x"));
  ASSERT_TRUE(e);
  EXPECT_GT(e->value, 2.0);
  EXPECT_GT(e->std_error, 0.0);
  EXPECT_EQ(e->first_term_mode, FirstTermMode::kImputed);
  const auto again = ite(s, sum_classifier(), 2, t, b, cfg, rng_stream(1, "x"));
  EXPECT_EQ(e->value, again->value);
}

TEST(Effects, ChannelEffectOnlyTouchesThatChannel) {
  const auto s = two_channel();
  const ShiftImputer t(ClassLabel::kTarget, 1), b(ClassLabel::kBaseline, -1);
  EngineConfig cfg;
  cfg.n_imputations = 20;
  const auto glob = ite(s, sum_classifier(), 2, t, b, cfg, rng_stream(1, "x"));
  const auto ch0 = channel_effect(s, sum_classifier(), 2, 0, {&t, &b, nullptr},
                                  EffectKind::kCausal, cfg, rng_stream(1, "x"));
  ASSERT_TRUE(ch0);
  // Channel 0 holds two of the five concept-2 positions.
  EXPECT_GT(ch0->value, 0.0);
  EXPECT_LT(ch0->value, glob->value);
}

TEST(Effects, FirstTermDiagnosticRequiresMatchingClass) {
  const auto s = two_channel();
  const ShiftImputer b(ClassLabel::kBaseline, 0);
  EXPECT_THROW(first_term_diagnostic(s, sum_classifier(), 1, b, {}, rng_stream(1, "d")),
               ConfigError);
  const IdentityImputer id(ClassLabel::kTarget);
  EXPECT_EQ(*first_term_diagnostic(s, sum_classifier(), 1, id, {}, rng_stream(1, "d")), 0.0);
}

TEST(Engine, ConfigValidation) {
  EngineConfig c;
  c.n_imputations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.level = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.prob_clamp = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

struct Fixture {
  scm::GroundTruth gt;
  Dataset d;
  std::unique_ptr<ProbClassifier> f;
  scm::InterventionalImputer t, b;
  scm::ConditionalImputer c;
  Fixture()
      : gt(scm::make_ground_truth([] {
          scm::SCMConfig cfg;
          cfg.n_channels = 2;
          cfg.n_timesteps = 12;
          cfg.n_concepts = 3;
          cfg.linear = {{{0.0, 0.0}, {0.3, 0.3}, {1.0, 1.0}},
                        {{0.8, 0.4}, {0.3, 0.3}, {1.0, 1.0}},
                        {{0.2, 0.2}, {0.3, 0.3}, {1.0, 1.0}}};
          return cfg;
        }())),
        d(scm::generate_dataset(gt.config, 150, 3)),
        f(scm::bayes_classifier(gt)),
        t(gt, ClassLabel::kTarget),
        b(gt, ClassLabel::kBaseline),
        c(gt) {}
};

TEST(Matrix, GridLayoutAndThreadInvariance) {
  const Fixture fx;
  EngineConfig cfg;
  cfg.n_imputations = 4;
  cfg.bootstrap_B = 100;
  setenv("CCTS_THREADS", "1", 1);
  const auto one = effect_matrix(fx.d, *fx.f, {&fx.t, &fx.b, &fx.c}, {1, 2, 3}, cfg);
  setenv("CCTS_THREADS", "5", 1);
  const auto five = effect_matrix(fx.d, *fx.f, {&fx.t, &fx.b, &fx.c}, {1, 2, 3}, cfg);
  unsetenv("CCTS_THREADS");
  EXPECT_EQ(to_json(one), to_json(five));
  ASSERT_EQ(one.cells.size(), 9u);
  EXPECT_EQ(one.n_columns(), 3u);
  EXPECT_EQ(one.cells[2].concept_id, 1);
  EXPECT_FALSE(one.cells[2].channel.has_value());
  EXPECT_GT(one.cell(2, std::nullopt).ate, 0.0);
  EXPECT_THROW(one.cell(4, std::nullopt), DataError);

  MatrixOptions assoc;
  assoc.kind = EffectKind::kAssociational;
  assoc.channel_columns = false;
  const auto a = effect_matrix(fx.d, *fx.f, {&fx.t, &fx.b, &fx.c}, {2}, cfg, assoc);
  ASSERT_EQ(a.cells.size(), 1u);
  EXPECT_EQ(a.cells[0].kind, EffectKind::kAssociational);
}

TEST(Matrix, FailingCellIsRecordedAsMissing) {
  const Fixture fx;
  EngineConfig cfg;
  cfg.n_imputations = 2;
  cfg.bootstrap_B = 10;
  const auto r = effect_matrix(fx.d, *fx.f, {&fx.t, &fx.b, &fx.c}, {1, 7}, cfg);
  const auto& bad = r.cell(7, std::nullopt);
  EXPECT_TRUE(bad.missing);
  EXPECT_FALSE(bad.error.empty());
  EXPECT_FALSE(r.cell(1, std::nullopt).missing);
}

TEST(ResultIo, JsonRoundTripAndCsvHeader) {
  const Fixture fx;
  EngineConfig cfg;
  cfg.n_imputations = 2;
  cfg.bootstrap_B = 20;
  const auto r = effect_matrix(fx.d, *fx.f, {&fx.t, &fx.b, &fx.c}, {1, 2}, cfg);
  EXPECT_EQ(to_json(result_from_json(to_json(r))), to_json(r));
  std::ostringstream os;
  write_csv(os, r);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "concept,channel,kind,ate,low,high,significant,n_used,n_skipped");
  EXPECT_NE(text.find(",global,"), std::string::npos);
  EXPECT_THROW(result_from_json(nlohmann::json::parse(R"({"kind": "causal"})")), ParseError);
}

}  // namespace
}  // namespace ccts::attribution
