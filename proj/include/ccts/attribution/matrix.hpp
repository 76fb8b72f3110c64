#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccts/attribution/ate.hpp"

namespace ccts::attribution {

// Grid of cells, concept-major: for each concept (ascending) the channels in
// dataset order, then the global column.
struct AttributionResult {
  EffectKind kind = EffectKind::kCausal;
  ClassLabel target = ClassLabel::kTarget;
  std::vector<std::string> channel_names;
  std::vector<int> concepts;
  bool has_channel_columns = true;
  EngineConfig config;
  std::vector<AttributionCell> cells;

  // Throws DataError when the grid has no such cell.
  const AttributionCell& cell(int concept_id, std::optional<std::size_t> channel) const;
  std::size_t n_columns() const {
    return (has_channel_columns ? channel_names.size() : 0) + 1;
  }
};

struct MatrixOptions {
  EffectKind kind = EffectKind::kCausal;
  ClassLabel target = ClassLabel::kTarget;
  bool channel_columns = true;  // needs blackout-capable imputers
};

// Every (concept, channel) cell plus a global column per concept. A failing
// cell is recorded as missing with its message and the run continues.
AttributionResult effect_matrix(const Dataset& d, const ProbClassifier& f,
                                const ImputerSet& imputers, const std::vector<int>& concepts,
                                const EngineConfig& cfg, const MatrixOptions& opts = {});

}  // namespace ccts::attribution
