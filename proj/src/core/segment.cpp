#include "ccts/core/segment.hpp"

#include <algorithm>
#include <string>

#include "ccts/core/error.hpp"

namespace ccts {

SegmentIndex::SegmentIndex(std::vector<Position> positions)
    : positions_(std::move(positions)) {
  std::sort(positions_.begin(), positions_.end());
  positions_.erase(std::unique(positions_.begin(), positions_.end()),
                   positions_.end());
}

bool SegmentIndex::contains(const Position& p) const {
  return std::binary_search(positions_.begin(), positions_.end(), p);
}

SegmentIndex segment_index(const ConceptMask& mask, int concept_id,
                           std::optional<std::size_t> channel) {
  if (concept_id < 1 || concept_id > mask.n_concepts()) {
    throw DataError("concept " + std::to_string(concept_id) + " outside 1.." +
                    std::to_string(mask.n_concepts()));
  }
  if (channel && *channel >= mask.n_channels()) {
    throw ShapeError("channel " + std::to_string(*channel) +
                     " out of bounds for mask with " +
                     std::to_string(mask.n_channels()) + " channels");
  }
  std::vector<Position> out;
  const std::size_t c0 = channel ? *channel : 0;
  const std::size_t c1 = channel ? *channel + 1 : mask.n_channels();
  for (std::size_t c = c0; c < c1; ++c) {
    for (std::size_t t = 0; t < mask.n_timesteps(); ++t) {
      if (mask.label(c, t) == concept_id) out.push_back({c, t});
    }
  }
  return SegmentIndex(std::move(out));
}

std::vector<double> extract(const MultivariateSeries& series,
                            const SegmentIndex& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (const auto& p : idx) {
    if (p.channel >= series.n_channels() || p.timestep >= series.n_timesteps()) {
      throw ShapeError("segment position out of series bounds");
    }
    out.push_back(series.at(p.channel, p.timestep));
  }
  return out;
}

MultivariateSeries splice(const MultivariateSeries& base,
                          const SegmentIndex& idx,
                          std::span<const double> replacement) {
  if (replacement.size() != idx.size()) {
    throw ShapeError("splice: " + std::to_string(replacement.size()) +
                     " replacement values for " + std::to_string(idx.size()) +
                     " positions");
  }
  SeriesBuilder b(base);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& p = idx[i];
    if (p.channel >= base.n_channels() || p.timestep >= base.n_timesteps()) {
      throw ShapeError("splice: position out of series bounds");
    }
    b.at(p.channel, p.timestep) = replacement[i];
  }
  return b.build();
}

}  // namespace ccts
