#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccts/core/dataset.hpp"

namespace ccts::discovery {

// Six summary statistics of one concept's values. Absent concepts carry
// zeros with `absent` set.
struct ConceptStatsRow {
  std::string sample_id;
  std::optional<std::size_t> channel;  // empty: pooled over channels
  int concept_id = 0;
  double min = 0, max = 0, mean = 0;
  double std = 0;     // population (divide by count)
  double median = 0;  // midpoint of the central order statistics for even count
  std::size_t count = 0;
  bool absent = false;
  ClassLabel label = ClassLabel::kBaseline;
};

// One row per (channel, concept) when `per_channel`, else one per concept
// pooled over channels. Concepts run 1..C of the sample's mask.
std::vector<ConceptStatsRow> concept_stats(const LabeledSample& sample, bool per_channel);

// Header `sample_id,channel,concept,min,max,mean,std,median,count,label`;
// pooled rows use channel "all"; absent concepts show zeros with count 0.
void write_concept_stats_csv(std::ostream& os, const std::vector<ConceptStatsRow>& rows,
                             const std::vector<std::string>& channel_names);

}  // namespace ccts::discovery
