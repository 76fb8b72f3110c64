#include "ccts/attribution/matrix.hpp"

#include "ccts/core/error.hpp"

namespace ccts::attribution {

const AttributionCell& AttributionResult::cell(int concept_id,
                                               std::optional<std::size_t> channel) const {
  for (const auto& c : cells) {
    if (c.concept_id == concept_id && c.channel == channel) return c;
  }
  throw DataError("attribution grid has no cell for concept " + std::to_string(concept_id));
}

AttributionResult effect_matrix(const Dataset& d, const ProbClassifier& f,
                                const ImputerSet& imputers, const std::vector<int>& concepts,
                                const EngineConfig& cfg, const MatrixOptions& opts) {
  cfg.validate();
  const bool causal = opts.kind == EffectKind::kCausal;
  if (causal && (!imputers.target || !imputers.baseline)) {
    throw ConfigError("causal attribution needs target and baseline imputers");
  }
  if (!causal && !imputers.unconditional) {
    throw ConfigError("associational attribution needs an unconditional imputer");
  }
  AttributionResult res;
  res.kind = opts.kind;
  res.target = opts.target;
  res.channel_names = d.channel_names();
  res.concepts = concepts;
  res.has_channel_columns = opts.channel_columns;
  res.config = cfg;
  const std::string kind_tag(to_string(opts.kind));

  for (int c : concepts) {
    std::vector<std::optional<std::size_t>> columns;
    if (opts.channel_columns) {
      for (std::size_t ch = 0; ch < d.n_channels(); ++ch) columns.emplace_back(ch);
    }
    columns.emplace_back(std::nullopt);
    for (const auto& col : columns) {
      const std::string tag = (col ? "ch" + std::to_string(*col) : std::string("global")) +
                              "/" + kind_tag;
      EffectFn fn;
      if (col) {
        const std::size_t ch = *col;
        fn = [&, c, ch](const LabeledSample& s, const RandomStream& r) {
          return channel_effect(s, f, c, ch, imputers, opts.kind, cfg, r);
        };
      } else if (causal) {
        fn = [&, c](const LabeledSample& s, const RandomStream& r) {
          return ite(s, f, c, *imputers.target, *imputers.baseline, cfg, r);
        };
      } else {
        fn = [&, c](const LabeledSample& s, const RandomStream& r) {
          return iaa(s, f, c, *imputers.unconditional, cfg, r);
        };
      }
      AttributionCell cell;
      try {
        cell = ate(d, opts.target, c, tag, fn, cfg);
      } catch (const Error& e) {
        cell = AttributionCell{};
        cell.concept_id = c;
        cell.missing = true;
        cell.error = e.what();
      }
      cell.channel = col;
      cell.kind = opts.kind;
      res.cells.push_back(std::move(cell));
    }
  }
  return res;
}

}  // namespace ccts::attribution
