#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ccts/classifier/prob_classifier.hpp"
#include "ccts/imputer/segment_imputer.hpp"

namespace ccts::attribution {

struct EngineConfig {
  std::size_t n_imputations = 40;
  std::size_t bootstrap_B = 1000;
  double level = 0.95;
  double prob_clamp = kDefaultProbClamp;
  std::uint64_t seed = 0;
  std::size_t stderr_resamples = 200;

  void validate() const;  // throws ConfigError
};

enum class FirstTermMode { kImputed, kObserved };
std::string_view to_string(FirstTermMode m);

// One individual effect in bits:
//   value = log2(clamp(mean_prob_target)) - log2(clamp(mean_prob_baseline)).
// For associational effects the "target" term is the observed f(X).
struct EffectEstimate {
  double value = 0;
  double std_error = 0;
  std::size_t n_imputations = 0;
  double mean_prob_target = 0;
  double mean_prob_baseline = 0;
  FirstTermMode first_term_mode = FirstTermMode::kImputed;
};

// Individual treatment effect of `concept_id` (all channels): n_imputations
// hybrids under each class-specific imputer. Draw i of an imputer with label
// l uses rng.substream("do/<l>").substream(i), so swapping the two imputers
// swaps the hybrids and negates the value exactly. Returns nullopt (skip)
// when the concept is absent from the sample.
std::optional<EffectEstimate> ite(const LabeledSample& sample, const ProbClassifier& f,
                                  int concept_id, const SegmentImputer& imputer_target,
                                  const SegmentImputer& imputer_baseline,
                                  const EngineConfig& cfg, const RandomStream& rng);

// Individual associational attribution: log2 f(X) against the mean of f over
// n_imputations unconditional hybrids.
std::optional<EffectEstimate> iaa(const LabeledSample& sample, const ProbClassifier& f,
                                  int concept_id, const SegmentImputer& imputer_unconditional,
                                  const EngineConfig& cfg, const RandomStream& rng);

enum class EffectKind { kCausal, kAssociational };
std::string_view to_string(EffectKind k);
EffectKind effect_kind_from_string(std::string_view s);

struct ImputerSet {
  const SegmentImputer* target = nullptr;         // do(D = D*)
  const SegmentImputer* baseline = nullptr;       // do(D = D0)
  const SegmentImputer* unconditional = nullptr;  // p(X_c | complement)
};

// Channel-specific ITE / IAA: hybrids replace only the concept's positions on
// `channel`, via blackout imputation of the whole concept region. Skips when
// the concept is absent from that channel.
std::optional<EffectEstimate> channel_effect(const LabeledSample& sample,
                                             const ProbClassifier& f, int concept_id,
                                             std::size_t channel, const ImputerSet& imputers,
                                             EffectKind kind, const EngineConfig& cfg,
                                             const RandomStream& rng);

// log2(mean f over D*-imputed hybrids) - log2 f(X): the error of replacing the
// first ITE term by the observed prediction. nullopt when the concept is
// absent. Throws ConfigError when the imputer's class differs from the
// sample's label.
std::optional<double> first_term_diagnostic(const LabeledSample& sample,
                                            const ProbClassifier& f, int concept_id,
                                            const SegmentImputer& imputer_target,
                                            const EngineConfig& cfg, const RandomStream& rng);

// log2 of clamped means: the single rule every estimator uses.
double log2_mean_ratio(double mean_a, double mean_b, double eps);

}  // namespace ccts::attribution
