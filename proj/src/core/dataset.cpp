#include "ccts/core/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "ccts/core/error.hpp"

namespace ccts {

ClassLabel label_from_int(int v) {
  if (v == 0) return ClassLabel::kBaseline;
  if (v == 1) return ClassLabel::kTarget;
  throw DataError("class label must be 0 or 1, got " + std::to_string(v));
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(s) + "'");
}

void LabeledSample::validate() const {
  if (mask.n_channels() != series.n_channels() ||
      mask.n_timesteps() != series.n_timesteps()) {
    throw ShapeError("sample '" + sample_id + "': mask shape " +
                     std::to_string(mask.n_channels()) + "x" +
                     std::to_string(mask.n_timesteps()) +
                     " does not match series shape " +
                     std::to_string(series.n_channels()) + "x" +
                     std::to_string(series.n_timesteps()));
  }
}

Dataset::Dataset(std::vector<LabeledSample> samples, std::vector<Split> splits)
    : samples_(std::move(samples)), splits_(std::move(splits)) {
  if (splits_.size() != samples_.size()) {
    throw ShapeError("dataset: one split entry per sample required");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : samples_) {
    if (s.sample_id.empty()) throw DataError("dataset: empty sample_id");
    if (!seen.insert(s.sample_id).second) {
      throw DataError("dataset: duplicate sample_id '" + s.sample_id + "'");
    }
    s.validate();
    const auto& first = samples_.front();
    if (s.series.n_channels() != first.series.n_channels() ||
        s.series.channel_names() != first.series.channel_names()) {
      throw ShapeError("sample '" + s.sample_id +
                       "': channels differ from the first sample");
    }
    if (s.series.n_timesteps() != first.series.n_timesteps()) {
      throw ShapeError("sample '" + s.sample_id +
                       "': length differs from the first sample");
    }
  }
}

std::size_t Dataset::n_channels() const {
  return samples_.empty() ? 0 : samples_.front().series.n_channels();
}

std::size_t Dataset::n_timesteps() const {
  return samples_.empty() ? 0 : samples_.front().series.n_timesteps();
}

const std::vector<std::string>& Dataset::channel_names() const {
  static const std::vector<std::string> kEmpty;
  return samples_.empty() ? kEmpty : samples_.front().series.channel_names();
}

int Dataset::n_concepts() const {
  int c = 0;
  for (const auto& s : samples_) c = std::max(c, s.mask.n_concepts());
  return c;
}

std::vector<std::size_t> Dataset::indices(Split split,
                                          std::optional<ClassLabel> label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (splits_[i] != split) continue;
    if (label && samples_[i].label != *label) continue;
    out.push_back(i);
  }
  return out;
}

Dataset Dataset::with_masks(std::vector<ConceptMask> masks) const {
  if (masks.size() != samples_.size()) {
    throw ShapeError("with_masks: one mask per sample required");
  }
  std::vector<LabeledSample> out = samples_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].mask = std::move(masks[i]);
  return Dataset(std::move(out), splits_);
}

}  // namespace ccts
