#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccts/core/series.hpp"

namespace ccts::scm {

enum class Family { kLinearGaussian, kDiscrete };

// D = 1[bias + weight * S + sigma_d * L > 0] with the shared latent
// S = sigma_s * Z, Z ~ N(0, 1), and L standard logistic.
struct DiseaseMechanism {
  double bias = 0.0;
  double weight = 0.0;
  double sigma_d = 1.0;
  double sigma_s = 1.0;
};

// Equal-width contiguous segments cycling through concepts 1..C, independent
// of D. Each interior boundary moves by round(jitter * N(0, 1)), keeping
// every segment at least one step wide.
struct MaskMechanism {
  std::size_t n_segments = 0;  // 0: one segment per concept
  double jitter = 0.0;
};

// Linear-gaussian mechanism of one concept, per channel:
//   x_{k,t} = a_k * D + b_k * S + sigma_k * eps_{k,t}.
struct LinearConcept {
  std::vector<double> a, b, sigma;
};

// Discrete mechanism: level j ~ p(j | D) fills the concept region with
// levels[j][k] on channel k.
struct DiscreteConcept {
  std::vector<std::vector<double>> levels;
  std::vector<double> p_d0, p_d1;
};

struct SCMConfig {
  std::size_t n_channels = 1;
  std::size_t n_timesteps = 32;
  int n_concepts = 4;
  std::vector<std::string> channel_names;
  DiseaseMechanism disease;
  MaskMechanism mask;
  Family family = Family::kLinearGaussian;
  double sigma_x = 0.0;  // extra per-position noise, linear-gaussian only
  std::vector<LinearConcept> linear;      // one per concept (linear family)
  std::vector<DiscreteConcept> discrete;  // one per concept (discrete family)

  // Throws ConfigError describing the first violated invariant.
  void validate() const;
  std::size_t n_segments() const {
    return mask.n_segments ? mask.n_segments : static_cast<std::size_t>(n_concepts);
  }
};

// JSON schema (scalars broadcast over channels):
//   {"n_channels", "n_timesteps", "n_concepts", "channel_names"?,
//    "disease": {"bias", "weight", "sigma_d", "sigma_s"},
//    "mask": {"n_segments", "jitter"},
//    "family": "linear-gaussian" | "discrete", "sigma_x",
//    "concepts": [{"a", "b", "sigma"}] | [{"levels", "p_d0", "p_d1"}]}
SCMConfig config_from_json(const nlohmann::json& j);  // validates
nlohmann::json to_json(const SCMConfig& cfg);
SCMConfig load_config(const std::string& path);

// Mask without jitter (the geometry every jittered mask is drawn around).
ConceptMask canonical_mask(const SCMConfig& cfg);

}  // namespace ccts::scm
