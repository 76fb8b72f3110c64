#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccts/core/series.hpp"

namespace ccts {

// Binary class label. 1 is the target class D*, 0 the baseline class D0.
enum class ClassLabel : int { kBaseline = 0, kTarget = 1 };

ClassLabel label_from_int(int v);  // throws DataError outside {0, 1}
inline int to_int(ClassLabel l) { return static_cast<int>(l); }
inline ClassLabel other(ClassLabel l) {
  return l == ClassLabel::kTarget ? ClassLabel::kBaseline : ClassLabel::kTarget;
}

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);  // throws DataError

struct LabeledSample {
  MultivariateSeries series;
  ConceptMask mask;
  ClassLabel label = ClassLabel::kBaseline;
  std::string sample_id;

  // Throws ShapeError when series and mask disagree.
  void validate() const;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// Ordered collection of samples with a disjoint, exhaustive split assignment.
class Dataset {
 public:
  Dataset() = default;
  // Validates every invariant; throws ShapeError/DataError naming the sample.
  Dataset(std::vector<LabeledSample> samples, std::vector<Split> splits);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<LabeledSample>& samples() const noexcept { return samples_; }
  const std::vector<Split>& splits() const noexcept { return splits_; }
  Split split_of(std::size_t i) const { return splits_[i]; }

  std::size_t n_channels() const;
  std::size_t n_timesteps() const;
  const std::vector<std::string>& channel_names() const;
  // Largest declared concept count across samples.
  int n_concepts() const;

  // Indices (in dataset order) of samples in `split`, optionally filtered
  // by label.
  std::vector<std::size_t> indices(Split split,
                                   std::optional<ClassLabel> label = {}) const;

  // New dataset with every mask replaced (same order and splits).
  Dataset with_masks(std::vector<ConceptMask> masks) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledSample> samples_;
  std::vector<Split> splits_;
};

}  // namespace ccts
