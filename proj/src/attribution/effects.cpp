#include "ccts/attribution/effects.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::attribution {
namespace {

using HybridFn = std::function<MultivariateSeries(const SegmentImputer&, RandomStream&)>;

std::string stream_name(const SegmentImputer& imp, const char* fallback) {
  return imp.label() ? "do/" + std::to_string(to_int(*imp.label())) : fallback;
}

std::vector<double> batch(const ProbClassifier& f, const SegmentImputer& imp,
                          const HybridFn& hybrid, std::size_t n, const RandomStream& stream) {
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = stream.substream(i);
    try {
      probs[i] = f.classify(hybrid(imp, r));
    } catch (const Error& e) {
      throw Error("imputer '" + imp.name() + "' draw " + std::to_string(i) + ": " + e.what());
    }
  }
  return probs;
}

// Anchored at the first value so a batch of identical probabilities averages
// to exactly that probability (identity imputers, constant classifiers).
double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x - v.front();
  return v.front() + s / static_cast<double>(v.size());
}

// Bootstrap standard error of the effect over resampled imputation batches.
// An empty `b` means the baseline term is the fixed value `fixed_b`.
double bootstrap_stderr(const std::vector<double>& a, const std::vector<double>& b,
                        double fixed_b, bool a_is_fixed, double fixed_a,
                        const EngineConfig& cfg, RandomStream rng) {
  const std::size_t R = cfg.stderr_resamples;
  if (R < 2) return 0.0;
  std::vector<double> vals(R);
  const auto resample_mean = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[rng.uniform_index(v.size())];
    return s / static_cast<double>(v.size());
  };
  for (std::size_t r = 0; r < R; ++r) {
    const double ma = a_is_fixed ? fixed_a : resample_mean(a);
    const double mb = b.empty() ? fixed_b : resample_mean(b);
    vals[r] = log2_mean_ratio(ma, mb, cfg.prob_clamp);
  }
  return sample_std(vals);
}

EffectEstimate causal_estimate(const ProbClassifier& f, const SegmentImputer& target,
                               const SegmentImputer& baseline, const HybridFn& hybrid,
                               const EngineConfig& cfg, const RandomStream& rng) {
  std::string tname = stream_name(target, "target");
  std::string bname = stream_name(baseline, "baseline");
  if (tname == bname) {
    tname = "target";
    bname = "baseline";
  }
  const auto pt = batch(f, target, hybrid, cfg.n_imputations, rng.substream(tname));
  const auto pb = batch(f, baseline, hybrid, cfg.n_imputations, rng.substream(bname));
  EffectEstimate e;
  e.n_imputations = cfg.n_imputations;
  e.mean_prob_target = mean_of(pt);
  e.mean_prob_baseline = mean_of(pb);
  e.value = log2_mean_ratio(e.mean_prob_target, e.mean_prob_baseline, cfg.prob_clamp);
  e.std_error = bootstrap_stderr(pt, pb, 0, false, 0, cfg, rng.substream("stderr"));
  e.first_term_mode = FirstTermMode::kImputed;
  return e;
}

EffectEstimate associational_estimate(const LabeledSample& sample, const ProbClassifier& f,
                                      const SegmentImputer& uncond, const HybridFn& hybrid,
                                      const EngineConfig& cfg, const RandomStream& rng) {
  const double fx = f.classify(sample.series);
  const auto pc = batch(f, uncond, hybrid, cfg.n_imputations, rng.substream("cond"));
  EffectEstimate e;
  e.n_imputations = cfg.n_imputations;
  e.mean_prob_target = fx;
  e.mean_prob_baseline = mean_of(pc);
  e.value = log2_mean_ratio(fx, e.mean_prob_baseline, cfg.prob_clamp);
  e.std_error = bootstrap_stderr({}, pc, 0, true, fx, cfg, rng.substream("stderr"));
  e.first_term_mode = FirstTermMode::kObserved;
  return e;
}

HybridFn global_hybrid(const LabeledSample& sample, const SegmentIndex& idx) {
  return [&sample, &idx](const SegmentImputer& imp, RandomStream& r) {
    return impute_hybrid(imp, sample, idx, r);
  };
}

}  // namespace

void EngineConfig::validate() const {
  if (n_imputations < 1) throw ConfigError("n_imputations must be >= 1");
  if (!(level > 0 && level < 1)) throw ConfigError("level must lie in (0, 1)");
  if (bootstrap_B < 1) throw ConfigError("bootstrap_B must be >= 1");
  if (!(prob_clamp > 0 && prob_clamp < 0.5)) throw ConfigError("prob_clamp must lie in (0, 0.5)");
}

std::string_view to_string(FirstTermMode m) {
  return m == FirstTermMode::kImputed ? "imputed" : "observed";
}

std::string_view to_string(EffectKind k) {
  return k == EffectKind::kCausal ? "causal" : "associational";
}

EffectKind effect_kind_from_string(std::string_view s) {
  if (s == "causal") return EffectKind::kCausal;
  if (s == "associational") return EffectKind::kAssociational;
  throw ConfigError("unknown effect kind '" + std::string(s) + "'");
}

double log2_mean_ratio(double mean_a, double mean_b, double eps) {
  return std::log2(clamp_probability(mean_a, eps)) - std::log2(clamp_probability(mean_b, eps));
}

std::optional<EffectEstimate> ite(const LabeledSample& sample, const ProbClassifier& f,
                                  int concept_id, const SegmentImputer& imputer_target,
                                  const SegmentImputer& imputer_baseline,
                                  const EngineConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  const SegmentIndex idx = segment_index(sample.mask, concept_id);
  if (idx.empty()) return std::nullopt;
  return causal_estimate(f, imputer_target, imputer_baseline, global_hybrid(sample, idx), cfg,
                         rng);
}

std::optional<EffectEstimate> iaa(const LabeledSample& sample, const ProbClassifier& f,
                                  int concept_id, const SegmentImputer& imputer_unconditional,
                                  const EngineConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  const SegmentIndex idx = segment_index(sample.mask, concept_id);
  if (idx.empty()) return std::nullopt;
  return associational_estimate(sample, f, imputer_unconditional, global_hybrid(sample, idx),
                                cfg, rng);
}

std::optional<EffectEstimate> channel_effect(const LabeledSample& sample,
                                             const ProbClassifier& f, int concept_id,
                                             std::size_t channel, const ImputerSet& imputers,
                                             EffectKind kind, const EngineConfig& cfg,
                                             const RandomStream& rng) {
  cfg.validate();
  if (concept_id < 1 || concept_id > sample.mask.n_concepts()) {
    throw DataError("concept " + std::to_string(concept_id) + " outside the mask's range");
  }
  if (channel >= sample.series.n_channels()) throw ShapeError("channel out of bounds");
  if (!sample.mask.contains(concept_id, channel)) return std::nullopt;
  const HybridFn hybrid = [&](const SegmentImputer& imp, RandomStream& r) {
    return impute_channel_blackout(imp, sample, concept_id, channel, r);
  };
  if (kind == EffectKind::kCausal) {
    if (!imputers.target || !imputers.baseline) {
      throw ConfigError("causal effects need target and baseline imputers");
    }
    return causal_estimate(f, *imputers.target, *imputers.baseline, hybrid, cfg, rng);
  }
  if (!imputers.unconditional) throw ConfigError("associational effects need an imputer");
  return associational_estimate(sample, f, *imputers.unconditional, hybrid, cfg, rng);
}

std::optional<double> first_term_diagnostic(const LabeledSample& sample,
                                            const ProbClassifier& f, int concept_id,
                                            const SegmentImputer& imputer_target,
                                            const EngineConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  if (imputer_target.label() && *imputer_target.label() != sample.label) {
    throw ConfigError("first-term diagnostic needs the imputer of the sample's own class");
  }
  const SegmentIndex idx = segment_index(sample.mask, concept_id);
  if (idx.empty()) return std::nullopt;
  const auto pt = batch(f, imputer_target, global_hybrid(sample, idx), cfg.n_imputations,
                        rng.substream(stream_name(imputer_target, "target")));
  return log2_mean_ratio(mean_of(pt), f.classify(sample.series), cfg.prob_clamp);
}

}  // namespace ccts::attribution
