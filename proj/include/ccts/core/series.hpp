#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccts {

// Real-valued signal with `n_channels` rows and `n_timesteps` columns,
// stored row-major (channel-major). All values are finite.
class MultivariateSeries {
 public:
  MultivariateSeries() = default;

  // Throws DataError on non-finite values, ShapeError on size mismatch.
  // Empty `channel_names` is replaced by "ch0", "ch1", ...
  MultivariateSeries(std::size_t n_channels, std::size_t n_timesteps,
                     std::vector<double> values,
                     std::vector<std::string> channel_names = {},
                     std::optional<double> dt = std::nullopt);

  static MultivariateSeries zeros(std::size_t n_channels,
                                  std::size_t n_timesteps,
                                  std::vector<std::string> channel_names = {});

  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_timesteps() const noexcept { return n_timesteps_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t channel, std::size_t t) const {
    return values_[channel * n_timesteps_ + t];
  }
  std::span<const double> channel(std::size_t c) const {
    return {values_.data() + c * n_timesteps_, n_timesteps_};
  }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }
  std::optional<double> dt() const noexcept { return dt_; }

  // Copy with one value replaced; the only mutation path besides splice.
  MultivariateSeries with_value(std::size_t channel, std::size_t t,
                                double v) const;

  friend bool operator==(const MultivariateSeries&,
                         const MultivariateSeries&) = default;

 private:
  friend class SeriesBuilder;

  std::size_t n_channels_ = 0;
  std::size_t n_timesteps_ = 0;
  std::vector<double> values_;
  std::vector<std::string> channel_names_;
  std::optional<double> dt_;
};

// Mutable staging buffer used by code that assembles a series value by value
// (splicing, sampling). `build()` validates and hands out an immutable series.
class SeriesBuilder {
 public:
  explicit SeriesBuilder(const MultivariateSeries& base);
  SeriesBuilder(std::size_t n_channels, std::size_t n_timesteps,
                std::vector<std::string> channel_names = {});

  double& at(std::size_t channel, std::size_t t) {
    return values_[channel * n_timesteps_ + t];
  }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_timesteps() const noexcept { return n_timesteps_; }

  MultivariateSeries build() const;

 private:
  std::size_t n_channels_;
  std::size_t n_timesteps_;
  std::vector<double> values_;
  std::vector<std::string> channel_names_;
  std::optional<double> dt_;
};

// Concept labels in 1..C, either one label per timestep (broadcast across
// channels) or one label per (channel, timestep).
class ConceptMask {
 public:
  ConceptMask() = default;

  // Channel-agnostic form.
  static ConceptMask per_timestep(std::vector<int> labels,
                                  std::size_t n_channels, int n_concepts);
  // Channel-specific form; `labels` is row-major [n_channels x n_timesteps].
  static ConceptMask per_channel(std::vector<int> labels,
                                 std::size_t n_channels,
                                 std::size_t n_timesteps, int n_concepts);

  int label(std::size_t channel, std::size_t t) const {
    return channel_agnostic_ ? labels_[t] : labels_[channel * n_timesteps_ + t];
  }
  bool channel_agnostic() const noexcept { return channel_agnostic_; }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_timesteps() const noexcept { return n_timesteps_; }
  int n_concepts() const noexcept { return n_concepts_; }
  const std::vector<int>& raw_labels() const noexcept { return labels_; }

  // True when at least one position carries `concept`.
  bool contains(int concept_id) const;
  // True when `channel` has at least one position carrying `concept`.
  bool contains(int concept_id, std::size_t channel) const;

  // Same labels, different declared concept count (must cover every label).
  ConceptMask with_n_concepts(int n_concepts) const;

  // Equality is semantic: a vector mask equals the matrix mask it expands to.
  friend bool operator==(const ConceptMask& a, const ConceptMask& b);

 private:
  std::vector<int> labels_;
  std::size_t n_channels_ = 0;
  std::size_t n_timesteps_ = 0;
  int n_concepts_ = 0;
  bool channel_agnostic_ = true;
};

}  // namespace ccts
