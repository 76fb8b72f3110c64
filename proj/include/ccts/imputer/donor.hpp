#pragma once

#include <optional>
#include <vector>

#include "ccts/imputer/segment_imputer.hpp"

namespace ccts::imputer {

// Training samples that donate segment values.
struct DonorPool {
  std::vector<LabeledSample> donors;
  std::optional<ClassLabel> label;  // empty: unconditional pool
};

// Train-split samples, restricted to `label_filter` when given. Throws
// DataError when the resulting pool is empty.
DonorPool donor_fit(const Dataset& d, std::optional<ClassLabel> label_filter);

// Copies the values of a uniformly drawn donor at the positions of `idx`.
// Where the donor's mask differs from the sample's, each position takes the
// donor's nearest timestep (earlier on ties) carrying the same concept on the
// same channel. Donors lacking the concept are redrawn up to 50 times, then
// DataError is thrown.
std::vector<double> donor_impute(const DonorPool& pool, const LabeledSample& sample,
                                 const SegmentIndex& idx, RandomStream& rng);

class DonorImputer final : public SegmentImputer {
 public:
  explicit DonorImputer(DonorPool pool) : pool_(std::move(pool)) {}
  std::vector<double> impute(const LabeledSample& sample, const SegmentIndex& idx,
                             RandomStream& rng) const override {
    return donor_impute(pool_, sample, idx, rng);
  }
  Conditioning conditioning() const override {
    return pool_.label ? Conditioning::kClassSpecific : Conditioning::kUnconditional;
  }
  std::optional<ClassLabel> label() const override { return pool_.label; }
  std::string name() const override { return "donor"; }
  const DonorPool& pool() const noexcept { return pool_; }

 private:
  DonorPool pool_;
};

}  // namespace ccts::imputer
