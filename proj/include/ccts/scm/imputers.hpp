#pragma once

#include <cstddef>

#include "ccts/imputer/segment_imputer.hpp"
#include "ccts/scm/bayes.hpp"

namespace ccts::scm {

// Exact sampler of p(X_idx | do(D = d)): a fresh shared latent, fresh
// per-position noise (linear-gaussian) or a fresh level per concept
// (discrete). The observed complement is ignored.
class InterventionalImputer final : public SegmentImputer {
 public:
  InterventionalImputer(GroundTruth gt, ClassLabel d);
  std::vector<double> impute(const LabeledSample& sample, const SegmentIndex& idx,
                             RandomStream& rng) const override;
  Conditioning conditioning() const override { return Conditioning::kClassSpecific; }
  std::optional<ClassLabel> label() const override { return d_; }
  std::string name() const override { return "scm-interventional"; }

 private:
  GroundTruth gt_;
  ClassLabel d_;
};

// Exact sampler of p(X_idx | X_complement), marginal over D and the shared
// latent. The sample's own mask fixes which mechanism produced each position.
class ConditionalImputer final : public SegmentImputer {
 public:
  explicit ConditionalImputer(GroundTruth gt, std::size_t max_rejections = 100000);
  std::vector<double> impute(const LabeledSample& sample, const SegmentIndex& idx,
                             RandomStream& rng) const override;
  Conditioning conditioning() const override { return Conditioning::kUnconditional; }
  std::optional<ClassLabel> label() const override { return std::nullopt; }
  std::string name() const override { return "scm-conditional"; }

  // p(D = 1 | values outside idx).
  double posterior_target(const LabeledSample& sample, const SegmentIndex& idx) const;

 private:
  GroundTruth gt_;
  std::size_t max_rejections_;
};

// Sufficient statistics of the positions of `sample` outside `idx`.
LinearStats complement_stats(const GroundTruth& gt, const LabeledSample& sample,
                             const SegmentIndex& idx);

// For each concept, the level identified from its positions outside `idx`
// (or -1 when every position of the concept lies in idx).
std::vector<long> observed_levels(const GroundTruth& gt, const LabeledSample& sample,
                                  const SegmentIndex& idx);

// Discrete family: log p(observed levels | D = d) + log p(D = d).
double discrete_log_joint(const GroundTruth& gt, const std::vector<long>& levels, int d);

}  // namespace ccts::scm
