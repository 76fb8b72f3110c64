#include "ccts/imputer/segment_imputer.hpp"

#include "ccts/core/error.hpp"

namespace ccts {

std::vector<double> IdentityImputer::impute(const LabeledSample& sample,
                                            const SegmentIndex& idx,
                                            RandomStream&) const {
  return extract(sample.series, idx);
}

MultivariateSeries impute_hybrid(const SegmentImputer& imputer,
                                 const LabeledSample& sample,
                                 const SegmentIndex& idx, RandomStream& rng) {
  const auto values = imputer.impute(sample, idx, rng);
  return splice(sample.series, idx, values);
}

MultivariateSeries impute_channel_blackout(const SegmentImputer& imputer,
                                           const LabeledSample& sample,
                                           int concept_id, std::size_t channel,
                                           RandomStream& rng) {
  if (!imputer.blackout_capable()) {
    throw UnsupportedError("imputer '" + imputer.name() +
                           "' was not trained for blackout imputation");
  }
  if (channel >= sample.series.n_channels()) {
    throw ShapeError("channel " + std::to_string(channel) + " out of bounds");
  }
  const SegmentIndex region = segment_index(sample.mask, concept_id);
  if (!sample.mask.contains(concept_id, channel)) {
    throw DataError("sample '" + sample.sample_id + "': concept " +
                    std::to_string(concept_id) + " absent from channel " +
                    std::to_string(channel));
  }
  const auto values = imputer.impute(sample, region, rng);
  if (values.size() != region.size()) {
    throw ShapeError("imputer '" + imputer.name() + "' returned " +
                     std::to_string(values.size()) + " values for " +
                     std::to_string(region.size()) + " positions");
  }
  SeriesBuilder b(sample.series);
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region[i].channel == channel) b.at(channel, region[i].timestep) = values[i];
  }
  return b.build();
}

}  // namespace ccts
