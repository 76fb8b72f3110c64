#include "ccts/core/series.hpp"

#include <algorithm>
#include <cmath>

#include "ccts/core/error.hpp"

namespace ccts {
namespace {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("ch" + std::to_string(i));
  return names;
}

}  // namespace

MultivariateSeries::MultivariateSeries(std::size_t n_channels,
                                       std::size_t n_timesteps,
                                       std::vector<double> values,
                                       std::vector<std::string> channel_names,
                                       std::optional<double> dt)
    : n_channels_(n_channels),
      n_timesteps_(n_timesteps),
      values_(std::move(values)),
      channel_names_(std::move(channel_names)),
      dt_(dt) {
  if (n_channels_ == 0 || n_timesteps_ == 0) {
    throw ShapeError("series needs at least one channel and one timestep");
  }
  if (values_.size() != n_channels_ * n_timesteps_) {
    throw ShapeError("series has " + std::to_string(values_.size()) +
                     " values, expected " +
                     std::to_string(n_channels_ * n_timesteps_));
  }
  if (channel_names_.empty()) channel_names_ = default_names(n_channels_);
  if (channel_names_.size() != n_channels_) {
    throw ShapeError("channel_names length does not match n_channels");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite value at channel " +
                      std::to_string(i / n_timesteps_) + ", timestep " +
                      std::to_string(i % n_timesteps_));
    }
  }
  if (dt_ && !(std::isfinite(*dt_) && *dt_ > 0)) {
    throw DataError("dt must be positive and finite");
  }
}

MultivariateSeries MultivariateSeries::zeros(
    std::size_t n_channels, std::size_t n_timesteps,
    std::vector<std::string> channel_names) {
  return MultivariateSeries(n_channels, n_timesteps,
                            std::vector<double>(n_channels * n_timesteps, 0.0),
                            std::move(channel_names));
}

MultivariateSeries MultivariateSeries::with_value(std::size_t channel,
                                                  std::size_t t,
                                                  double v) const {
  SeriesBuilder b(*this);
  b.at(channel, t) = v;
  return b.build();
}

SeriesBuilder::SeriesBuilder(const MultivariateSeries& base)
    : n_channels_(base.n_channels()),
      n_timesteps_(base.n_timesteps()),
      values_(base.values().begin(), base.values().end()),
      channel_names_(base.channel_names()),
      dt_(base.dt()) {}

SeriesBuilder::SeriesBuilder(std::size_t n_channels, std::size_t n_timesteps,
                             std::vector<std::string> channel_names)
    : n_channels_(n_channels),
      n_timesteps_(n_timesteps),
      values_(n_channels * n_timesteps, 0.0),
      channel_names_(std::move(channel_names)) {}

MultivariateSeries SeriesBuilder::build() const {
  return MultivariateSeries(n_channels_, n_timesteps_, values_, channel_names_,
                            dt_);
}

ConceptMask ConceptMask::per_timestep(std::vector<int> labels,
                                      std::size_t n_channels,
                                      int n_concepts) {
  if (labels.empty() || n_channels == 0) {
    throw ShapeError("mask needs at least one channel and one timestep");
  }
  if (n_concepts < 1) throw DataError("n_concepts must be >= 1");
  for (int l : labels) {
    if (l < 1 || l > n_concepts) {
      throw DataError("mask label " + std::to_string(l) + " outside 1.." +
                      std::to_string(n_concepts));
    }
  }
  ConceptMask m;
  m.n_timesteps_ = labels.size();
  m.labels_ = std::move(labels);
  m.n_channels_ = n_channels;
  m.n_concepts_ = n_concepts;
  m.channel_agnostic_ = true;
  return m;
}

ConceptMask ConceptMask::per_channel(std::vector<int> labels,
                                     std::size_t n_channels,
                                     std::size_t n_timesteps,
                                     int n_concepts) {
  if (n_channels == 0 || n_timesteps == 0) {
    throw ShapeError("mask needs at least one channel and one timestep");
  }
  if (labels.size() != n_channels * n_timesteps) {
    throw ShapeError("mask has " + std::to_string(labels.size()) +
                     " labels, expected " +
                     std::to_string(n_channels * n_timesteps));
  }
  if (n_concepts < 1) throw DataError("n_concepts must be >= 1");
  for (int l : labels) {
    if (l < 1 || l > n_concepts) {
      throw DataError("mask label " + std::to_string(l) + " outside 1.." +
                      std::to_string(n_concepts));
    }
  }
  ConceptMask m;
  m.labels_ = std::move(labels);
  m.n_channels_ = n_channels;
  m.n_timesteps_ = n_timesteps;
  m.n_concepts_ = n_concepts;
  m.channel_agnostic_ = false;
  return m;
}

bool ConceptMask::contains(int concept_id) const {
  return std::find(labels_.begin(), labels_.end(), concept_id) != labels_.end();
}

bool ConceptMask::contains(int concept_id, std::size_t channel) const {
  if (channel_agnostic_) return contains(concept_id);
  auto first = labels_.begin() + static_cast<std::ptrdiff_t>(channel * n_timesteps_);
  return std::find(first, first + static_cast<std::ptrdiff_t>(n_timesteps_),
                   concept_id) != first + static_cast<std::ptrdiff_t>(n_timesteps_);
}

ConceptMask ConceptMask::with_n_concepts(int n_concepts) const {
  return channel_agnostic_
             ? per_timestep(labels_, n_channels_, n_concepts)
             : per_channel(labels_, n_channels_, n_timesteps_, n_concepts);
}

bool operator==(const ConceptMask& a, const ConceptMask& b) {
  if (a.n_channels_ != b.n_channels_ || a.n_timesteps_ != b.n_timesteps_ ||
      a.n_concepts_ != b.n_concepts_) {
    return false;
  }
  if (a.channel_agnostic_ == b.channel_agnostic_) return a.labels_ == b.labels_;
  for (std::size_t c = 0; c < a.n_channels_; ++c) {
    for (std::size_t t = 0; t < a.n_timesteps_; ++t) {
      if (a.label(c, t) != b.label(c, t)) return false;
    }
  }
  return true;
}

}  // namespace ccts
