#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccts/core/dataset.hpp"
#include "ccts/core/rng.hpp"
#include "ccts/core/segment.hpp"

namespace ccts {

enum class Conditioning {
  kClassSpecific,  // samples p(X_c | do(D = label))
  kUnconditional,  // samples p(X_c | complement), marginal over the class
};

// Sampler of replacement values for a masked region of a sample.
//
// impute() returns values aligned to `idx` and must not read the sample's
// values at `idx`. Calls with independent streams are i.i.d. draws; the same
// stream state yields the same draw. Implementations are reentrant.
class SegmentImputer {
 public:
  virtual ~SegmentImputer() = default;

  virtual std::vector<double> impute(const LabeledSample& sample,
                                     const SegmentIndex& idx,
                                     RandomStream& rng) const = 0;

  virtual Conditioning conditioning() const = 0;
  // Class the sampler is specific to; empty for unconditional imputers.
  virtual std::optional<ClassLabel> label() const = 0;
  // Whether the sampler may be used for channel-specific (blackout) effects.
  virtual bool blackout_capable() const { return true; }
  virtual std::string name() const = 0;
};

// Returns the original values; a zero-effect reference sampler.
class IdentityImputer final : public SegmentImputer {
 public:
  explicit IdentityImputer(std::optional<ClassLabel> label = std::nullopt)
      : label_(label) {}
  std::vector<double> impute(const LabeledSample& sample, const SegmentIndex& idx,
                             RandomStream& rng) const override;
  Conditioning conditioning() const override {
    return label_ ? Conditioning::kClassSpecific : Conditioning::kUnconditional;
  }
  std::optional<ClassLabel> label() const override { return label_; }
  std::string name() const override { return "identity"; }

 private:
  std::optional<ClassLabel> label_;
};

// Draws from `imputer` and splices the draw into the sample's series.
MultivariateSeries impute_hybrid(const SegmentImputer& imputer,
                                 const LabeledSample& sample,
                                 const SegmentIndex& idx, RandomStream& rng);

// Channel-specific hybrid: imputes the whole (all-channel) region of
// `concept_id` so that no same-time value of another channel is observed,
// then keeps the imputed values only on `channel`. Every other position
// equals the input. Throws DataError when the concept is absent from
// `channel`, UnsupportedError when the imputer is not blackout-capable.
MultivariateSeries impute_channel_blackout(const SegmentImputer& imputer,
                                           const LabeledSample& sample,
                                           int concept_id, std::size_t channel,
                                           RandomStream& rng);

}  // namespace ccts
