#include "ccts/attribution/ate.hpp"

#include <algorithm>

#include "ccts/core/error.hpp"
#include "ccts/core/parallel.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::attribution {

IntervalSummary summarize_effects(std::span<const double> effects, std::size_t B,
                                  double level, RandomStream rng) {
  if (effects.empty()) throw DataError("no effects to summarize");
  IntervalSummary s;
  s.ate = mean(effects);
  const std::size_t n = effects.size();
  std::vector<double> means(B);
  for (auto& m : means) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += effects[rng.uniform_index(n)];
    m = acc / static_cast<double>(n);
  }
  const double alpha = 1.0 - level;
  s.low = quantile(means, alpha / 2);
  s.high = quantile(std::move(means), 1.0 - alpha / 2);
  s.low = std::min(s.low, s.ate);
  s.high = std::max(s.high, s.ate);
  s.significant = s.low > 0 || s.high < 0;
  return s;
}

AttributionCell ate(const Dataset& d, ClassLabel target, int concept_id,
                    const std::string& cell_tag, const EffectFn& effect,
                    const EngineConfig& cfg) {
  cfg.validate();
  const auto idx = d.indices(Split::kTest, target);
  std::vector<std::optional<EffectEstimate>> est(idx.size());
  parallel_for(idx.size(), [&](std::size_t k) {
    const auto& s = d[idx[k]];
    const auto rng = rng_stream(cfg.seed, "effect/" + s.sample_id + "/" +
                                              std::to_string(concept_id) + "/" + cell_tag);
    est[k] = effect(s, rng);
  });
  AttributionCell cell;
  cell.concept_id = concept_id;
  std::vector<double> values;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!est[k]) {
      ++cell.n_skipped;
      continue;
    }
    values.push_back(est[k]->value);
    cell.per_sample.push_back({d[idx[k]].sample_id, *est[k]});
  }
  cell.n_used = values.size();
  if (values.empty()) {
    throw DataError("concept " + std::to_string(concept_id) + ": no test sample of label " +
                    std::to_string(to_int(target)) + " carries the concept");
  }
  const auto s = summarize_effects(
      values, cfg.bootstrap_B, cfg.level,
      rng_stream(cfg.seed, "ate/" + std::to_string(concept_id) + "/" + cell_tag));
  cell.ate = s.ate;
  cell.low = s.low;
  cell.high = s.high;
  cell.significant = s.significant;
  return cell;
}

}  // namespace ccts::attribution
