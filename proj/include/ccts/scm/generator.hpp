#pragma once

#include <cstdint>

#include "ccts/core/dataset.hpp"
#include "ccts/core/rng.hpp"
#include "ccts/scm/config.hpp"

namespace ccts::scm {

// Latent draws behind one generated sample, exposed for tests.
struct SampleLatents {
  double z = 0;        // shared latent, standardized (S = sigma_s * z)
  double eps_d = 0;    // logistic disease noise
  ClassLabel label = ClassLabel::kBaseline;
};

// Draws D, then the mask, then every concept region; `rng` is consumed in
// that order.
LabeledSample generate_sample(const SCMConfig& cfg, RandomStream& rng,
                              std::string sample_id, SampleLatents* latents = nullptr);

// n i.i.d. samples, sample i drawn from stream (seed, "scm/sample/<i>") and
// named "s000000", "s000001", ... Splits by index: first 60% train, next
// 20% validation, rest test. Throws ConfigError on an invalid config or n = 0.
Dataset generate_dataset(const SCMConfig& cfg, std::size_t n, std::uint64_t seed);

// Jittered mask draw (the jitter-free mask when jitter is 0).
ConceptMask draw_mask(const SCMConfig& cfg, RandomStream& rng);

}  // namespace ccts::scm
