#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccts/attribution/effects.hpp"
#include "ccts/core/dataset.hpp"

namespace ccts::attribution {

struct IntervalSummary {
  double ate = 0;
  double low = 0, high = 0;
  bool significant = false;  // 0 outside [low, high]
};

// Mean of `effects` with a percentile bootstrap interval over B resamples of
// the list (type-7 quantiles). The interval is widened to include the mean in
// the rare case the percentiles miss it. Throws DataError on an empty list.
IntervalSummary summarize_effects(std::span<const double> effects, std::size_t B,
                                  double level, RandomStream rng);

struct SampleEffect {
  std::string sample_id;
  EffectEstimate estimate;
};

// One (concept, channel-or-global) cell of an attribution grid.
struct AttributionCell {
  int concept_id = 0;
  std::optional<std::size_t> channel;  // empty: global (all channels)
  EffectKind kind = EffectKind::kCausal;
  double ate = 0, low = 0, high = 0;
  bool significant = false;
  std::size_t n_used = 0, n_skipped = 0;
  std::vector<SampleEffect> per_sample;
  bool missing = false;  // the cell failed; `error` says why
  std::string error;
};

using EffectFn =
    std::function<std::optional<EffectEstimate>(const LabeledSample&, const RandomStream&)>;

// Average effect over test-split samples with label `target` for which
// `effect` does not skip. Sample s uses stream
// (cfg.seed, "effect/<sample_id>/<concept>/<cell_tag>"); samples run in
// parallel. Throws DataError when no sample is usable.
AttributionCell ate(const Dataset& d, ClassLabel target, int concept_id,
                    const std::string& cell_tag, const EffectFn& effect,
                    const EngineConfig& cfg);

}  // namespace ccts::attribution
