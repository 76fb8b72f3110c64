#include <algorithm>
#include <cmath>

#include "ccts/core/error.hpp"
#include "ccts/imputer/denoiser.hpp"

namespace ccts::imputer {

std::string_view to_string(MaskMode m) {
  return m == MaskMode::kBlackout ? "blackout" : "concept-regions";
}

MaskMode mask_mode_from_string(std::string_view s) {
  if (s == "concept-regions") return MaskMode::kConceptRegions;
  if (s == "blackout" || s == "blackout-random") return MaskMode::kBlackout;
  throw ConfigError("unknown mask mode '" + std::string(s) +
                    "' (expected concept-regions or blackout)");
}

SegmentIndex sample_training_mask(const LabeledSample& sample, MaskMode mode,
                                  RandomStream& rng) {
  const std::size_t nc = sample.series.n_channels();
  const std::size_t nt = sample.series.n_timesteps();
  if (mode == MaskMode::kConceptRegions) {
    std::vector<int> present;
    for (int c = 1; c <= sample.mask.n_concepts(); ++c) {
      if (sample.mask.contains(c)) present.push_back(c);
    }
    const int c = present[rng.uniform_index(present.size())];
    return segment_index(sample.mask, c);
  }
  // Window length uniform in [10%, 40%] of the series, at least one step.
  const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * nt)));
  const auto hi = std::max(lo, static_cast<std::size_t>(std::floor(0.4 * nt)));
  const std::size_t len = std::min(nt, lo + rng.uniform_index(hi - lo + 1));
  const std::size_t start = rng.uniform_index(nt - len + 1);
  std::vector<Position> pos;
  pos.reserve(nc * len);
  for (std::size_t ch = 0; ch < nc; ++ch) {
    for (std::size_t t = start; t < start + len; ++t) pos.push_back({ch, t});
  }
  return SegmentIndex(std::move(pos));
}

}  // namespace ccts::imputer
