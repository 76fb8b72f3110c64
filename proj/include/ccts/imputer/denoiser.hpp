#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccts/core/dataset.hpp"
#include "ccts/core/rng.hpp"
#include "ccts/core/segment.hpp"

namespace ccts::imputer {

enum class MaskMode {
  kConceptRegions,  // region of one uniformly chosen concept present in the sample
  kBlackout,        // every channel over a random contiguous window
};

std::string_view to_string(MaskMode m);
MaskMode mask_mode_from_string(std::string_view s);  // throws ConfigError

// Training mask for `sample`: positions to corrupt.
SegmentIndex sample_training_mask(const LabeledSample& sample, MaskMode mode,
                                  RandomStream& rng);

// Per-position input features of the denoiser at one window offset.
inline constexpr std::size_t kFeaturesPerPosition = 6;
// Sinusoidal step-embedding width (two noise-level scalars are appended).
inline constexpr std::size_t kStepEmbedding = 16;

// Noise predictor applied independently at every timestep column:
//   in  = [window features over offsets -R..R and all channels, step embedding]
//   h1  = silu(W1 in + b1)
//   h2  = h1 + silu(W2 h1 + b2)
//   out = W3 h2 + b3                       (one noise estimate per channel)
// Parameters live in one flat vector: W1, b1, W2, b2, W3, b3 (row-major).
struct DenoiserModel {
  std::size_t n_channels = 0;
  std::size_t n_timesteps = 0;
  std::size_t radius = 8;
  std::size_t hidden = 128;
  std::size_t schedule_T = 200;
  double beta0 = 1e-4;
  double beta1 = 0.02;
  MaskMode mask_mode = MaskMode::kConceptRegions;
  std::optional<ClassLabel> label;
  std::vector<double> channel_mean;
  std::vector<double> channel_scale;
  std::vector<double> params;
  std::size_t iterations = 0;
  std::size_t selected_iter = 0;
  double validation_loss = 0;

  std::size_t input_dim() const {
    return (2 * radius + 1) * n_channels * kFeaturesPerPosition + kStepEmbedding + 2;
  }
  std::size_t param_count() const {
    const std::size_t d = input_dim();
    return hidden * d + hidden + hidden * hidden + hidden + n_channels * hidden +
           n_channels;
  }
};

// Random initialization (fan-in scaled normals, zero biases).
DenoiserModel init_denoiser(std::size_t n_channels, std::size_t n_timesteps,
                            std::size_t radius, std::size_t hidden,
                            std::size_t schedule_T, double beta0, double beta1,
                            RandomStream& rng);

// Scratch space for one forward/backward pass.
struct DenoiserWorkspace {
  std::vector<double> in, a1, h1, a2, h2, out, dh1, dh2, da1, da2;
  void resize(const DenoiserModel& m);
};

// Fills ws.in for column `t_col`. `state` holds standardized values
// (channel-major), noisy at masked positions; `masked` flags them.
// `abar` is the cumulative alpha product of `step`.
void denoiser_features(const DenoiserModel& m, std::span<const double> state,
                       std::span<const std::uint8_t> masked, std::size_t t_col,
                       std::size_t step, double abar, DenoiserWorkspace& ws);

// Forward pass from ws.in; result in ws.out.
void denoiser_forward(const DenoiserModel& m, DenoiserWorkspace& ws);

// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(out) and the
// activations left in `ws` by the matching forward pass.
void denoiser_backward(const DenoiserModel& m, DenoiserWorkspace& ws,
                       std::span<const double> dout, std::span<double> grad);

// Binary checkpoint: "CCTSDDPM", u32 version, shape and schedule header,
// standardization, then the f64 parameter vector; little-endian throughout.
void write_denoiser(const DenoiserModel& m, std::ostream& os);
DenoiserModel read_denoiser(std::istream& is);  // throws ParseError / IoError
void save_denoiser(const DenoiserModel& m, const std::string& path);
DenoiserModel load_denoiser(const std::string& path);

}  // namespace ccts::imputer
