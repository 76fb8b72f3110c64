#pragma once

#include <optional>

#include "ccts/classifier/prob_classifier.hpp"
#include "ccts/core/dataset.hpp"
#include "ccts/core/quadrature.hpp"
#include "ccts/scm/bayes.hpp"

namespace ccts::scm {

struct OracleEffects {
  double ite = 0;
  double iaa = 0;
  double mean_target = 0;       // E[f(hybrid)] under do(D = target)
  double mean_baseline = 0;     // E[f(hybrid)] under do(D = other(target))
  double mean_conditional = 0;  // E[f(hybrid)] under p(X_c | complement)
  double f_observed = 0;
};

// Exact ITE and IAA of `concept_id` for one sample, using the same clamped
// log2-of-means rule as the Monte-Carlo estimators. With `channel`, only the
// positions of the concept on that channel are replaced while conditioning
// still excludes the whole concept region (blackout semantics).
//
// Discrete family: enumeration over the concept's levels, any classifier.
// Linear-gaussian family: `f` must be a ProjectedClassifier; the hybrid's
// projection is Gaussian (a mixture over D for the conditional term) and its
// expectation is integrated adaptively. Throws UnsupportedError otherwise.
OracleEffects brute_force_effects(const GroundTruth& gt, const LabeledSample& sample,
                                  const ProbClassifier& f, int concept_id,
                                  ClassLabel target = ClassLabel::kTarget,
                                  std::optional<std::size_t> channel = std::nullopt,
                                  const IntegrationOptions& opts = {},
                                  double prob_clamp = kDefaultProbClamp);

// E[f] for a projected classifier whose projection is N(mean, cov).
double projected_expectation(const ProjectedClassifier& f,
                             const std::vector<double>& mean,
                             const std::vector<double>& cov,  // row-major r x r
                             const IntegrationOptions& opts = {});

}  // namespace ccts::scm
