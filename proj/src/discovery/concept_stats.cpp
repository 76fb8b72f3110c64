#include "ccts/discovery/concept_stats.hpp"

#include <algorithm>

#include "ccts/core/dataset_io.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::discovery {
namespace {

ConceptStatsRow summarize(std::vector<double> v) {
  ConceptStatsRow r;
  r.count = v.size();
  if (v.empty()) {
    r.absent = true;
    return r;
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  r.min = *lo;
  r.max = *hi;
  r.mean = mean(v);
  r.std = population_std(v);
  r.median = median(std::move(v));
  return r;
}

}  // namespace

std::vector<ConceptStatsRow> concept_stats(const LabeledSample& sample, bool per_channel) {
  const auto& x = sample.series;
  const int C = sample.mask.n_concepts();
  std::vector<ConceptStatsRow> rows;
  const std::size_t groups = per_channel ? x.n_channels() : 1;
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(C));
    for (std::size_t ch = 0; ch < x.n_channels(); ++ch) {
      if (per_channel && ch != g) continue;
      for (std::size_t t = 0; t < x.n_timesteps(); ++t) {
        vals[static_cast<std::size_t>(sample.mask.label(ch, t) - 1)].push_back(x.at(ch, t));
      }
    }
    for (int c = 1; c <= C; ++c) {
      ConceptStatsRow r = summarize(std::move(vals[static_cast<std::size_t>(c - 1)]));
      r.sample_id = sample.sample_id;
      if (per_channel) r.channel = g;
      r.concept_id = c;
      r.label = sample.label;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void write_concept_stats_csv(std::ostream& os, const std::vector<ConceptStatsRow>& rows,
                             const std::vector<std::string>& channel_names) {
  os << "sample_id,channel,concept,min,max,mean,std,median,count,label\n";
  for (const auto& r : rows) {
    os << r.sample_id << ',';
    if (r.channel) {
      os << (*r.channel < channel_names.size() ? channel_names[*r.channel]
                                               : std::to_string(*r.channel));
    } else {
      os << "all";
    }
    os << ',' << r.concept_id << ',';
    for (double v : {r.min, r.max, r.mean, r.std, r.median}) os << format_double(v) << ',';
    os << r.count << ',' << to_int(r.label) << '\n';
  }
}

}  // namespace ccts::discovery
