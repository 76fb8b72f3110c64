#include "ccts/classifier/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "ccts/core/error.hpp"
#include "ccts/core/rng.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::classifier {

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("auroc: scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney with mid-ranks; ranks are doubled to stay integral.
  double pos_rank2 = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid2 = static_cast<double>(i + 1 + j);  // 2 * average rank
    for (std::size_t k = i; k < j; ++k) {
      const int y = labels[order[k]];
      if (y == 1) {
        pos_rank2 += mid2;
        ++n_pos;
      } else if (y == 0) {
        ++n_neg;
      } else {
        throw DataError("auroc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("auroc: both classes required");
  const double np = static_cast<double>(n_pos);
  const double u2 = pos_rank2 - np * (np + 1.0);  // 2 * U statistic
  return u2 / (2.0 * np * static_cast<double>(n_neg));
}

BootstrapInterval bootstrap_metric(std::span<const double> scores,
                                   std::span<const int> labels, std::size_t B,
                                   double level, std::uint64_t seed,
                                   const Metric& metric) {
  if (B < 100) throw ConfigError("bootstrap needs B >= 100");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must be in (0, 1)");
  if (scores.size() != labels.size()) {
    throw ShapeError("bootstrap_metric: scores and labels differ in length");
  }
  BootstrapInterval out;
  out.point = metric(scores, labels);
  RandomStream rng(seed, "bootstrap_metric");
  const std::size_t n = scores.size();
  std::vector<double> rs(n);
  std::vector<int> rl(n);
  std::vector<double> stats;
  stats.reserve(B);
  constexpr std::size_t kMaxRedraws = 1000000;
  while (stats.size() < B) {
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.uniform_index(n);
      rs[i] = scores[k];
      rl[i] = labels[k];
      (rl[i] == 1 ? has1 : has0) = true;
    }
    if (!(has0 && has1)) {
      if (++out.n_redrawn > kMaxRedraws) {
        throw DataError("bootstrap_metric: resamples keep missing a class");
      }
      continue;
    }
    stats.push_back(metric(rs, rl));
  }
  const double alpha = 1.0 - level;
  out.low = quantile(stats, alpha / 2.0);
  out.high = quantile(stats, 1.0 - alpha / 2.0);
  return out;
}

}  // namespace ccts::classifier
