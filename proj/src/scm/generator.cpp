#include "ccts/scm/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ccts/core/error.hpp"
#include "ccts/core/parallel.hpp"
#include "ccts/scm/bayes.hpp"

namespace ccts::scm {
namespace {

std::size_t draw_level(const std::vector<double>& p, RandomStream& rng) {
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    acc += p[j];
    if (u < acc) return j;
  }
  // u beyond the accumulated mass (rounding): last level with mass
  for (std::size_t j = p.size(); j-- > 0;) {
    if (p[j] > 0) return j;
  }
  return 0;
}

}  // namespace

ConceptMask draw_mask(const SCMConfig& cfg, RandomStream& rng) {
  const std::size_t nt = cfg.n_timesteps;
  const std::size_t ns = cfg.n_segments();
  // bounds[s] = first timestep of segment s
  std::vector<long> bounds(ns + 1);
  for (std::size_t s = 0; s <= ns; ++s) {
    bounds[s] = static_cast<long>((s * nt + ns - 1) / ns);
  }
  if (cfg.mask.jitter > 0) {
    for (std::size_t s = 1; s < ns; ++s) {
      const long shift = std::lround(cfg.mask.jitter * rng.normal());
      const long lo = bounds[s - 1] + 1;
      const long hi = bounds[s + 1] - 1;
      bounds[s] = std::clamp(bounds[s] + shift, lo, std::max(lo, hi));
    }
  }
  std::vector<int> labels(nt);
  for (std::size_t s = 0; s < ns; ++s) {
    const int c = static_cast<int>(s % static_cast<std::size_t>(cfg.n_concepts)) + 1;
    for (long t = bounds[s]; t < bounds[s + 1]; ++t) labels[static_cast<std::size_t>(t)] = c;
  }
  return ConceptMask::per_timestep(std::move(labels), cfg.n_channels, cfg.n_concepts);
}

LabeledSample generate_sample(const SCMConfig& cfg, RandomStream& rng,
                              std::string sample_id, SampleLatents* latents) {
  const std::size_t nc = cfg.n_channels, nt = cfg.n_timesteps;
  const double z = rng.normal();
  const double eps_d = rng.logistic();
  const auto& dm = cfg.disease;
  const bool d1 = dm.bias + dm.weight * dm.sigma_s * z + dm.sigma_d * eps_d > 0;
  const int d = d1 ? 1 : 0;
  ConceptMask mask = draw_mask(cfg, rng);

  SeriesBuilder b(nc, nt, cfg.channel_names);
  if (cfg.family == Family::kLinearGaussian) {
    const auto terms = position_terms(cfg, mask);
    for (std::size_t i = 0; i < nc * nt; ++i) {
      b.at(i / nt, i % nt) = terms.a[i] * d + terms.beta[i] * z + terms.sd[i] * rng.normal();
    }
  } else {
    for (int c = 1; c <= cfg.n_concepts; ++c) {
      const auto& dc = cfg.discrete[static_cast<std::size_t>(c - 1)];
      const std::size_t j = draw_level(d1 ? dc.p_d1 : dc.p_d0, rng);
      for (const auto& p : segment_index(mask, c)) {
        b.at(p.channel, p.timestep) = dc.levels[j][p.channel];
      }
    }
  }
  if (latents) *latents = {z, eps_d, label_from_int(d)};
  return LabeledSample{b.build(), std::move(mask), label_from_int(d), std::move(sample_id)};
}

Dataset generate_dataset(const SCMConfig& cfg, std::size_t n, std::uint64_t seed) {
  cfg.validate();
  if (n == 0) throw ConfigError("n must be >= 1");
  std::vector<LabeledSample> samples(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = rng_stream(seed, "scm/sample/" + std::to_string(i));
    char id[32];
    std::snprintf(id, sizeof id, "s%06zu", i);
    samples[i] = generate_sample(cfg, rng, id);
  });
  std::vector<Split> splits(n);
  const std::size_t n_train = n * 6 / 10, n_val = n * 8 / 10;
  for (std::size_t i = 0; i < n; ++i) {
    splits[i] = i < n_train ? Split::kTrain : i < n_val ? Split::kValidation : Split::kTest;
  }
  return Dataset(std::move(samples), std::move(splits));
}

}  // namespace ccts::scm
