#include "ccts/discovery/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ccts/core/error.hpp"
#include "ccts/core/parallel.hpp"
#include "ccts/core/rng.hpp"

namespace ccts::discovery {
namespace {

double sqdist(const double* a, const double* b, std::size_t dim) {
  double s = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}

std::size_t count_distinct(std::span<const double> pts, std::size_t dim, std::size_t cap) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i * dim < pts.size() && seen.size() < cap; ++i) {
    seen.emplace(pts.begin() + static_cast<std::ptrdiff_t>(i * dim),
                 pts.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  }
  return seen.size();
}

// k-means++ seeding.
std::vector<double> seed_centroids(std::span<const double> pts, std::size_t n,
                                   std::size_t dim, std::size_t k, RandomStream& rng) {
  std::vector<double> c;
  c.reserve(k * dim);
  const std::size_t first = rng.uniform_index(n);
  c.insert(c.end(), pts.begin() + static_cast<std::ptrdiff_t>(first * dim),
           pts.begin() + static_cast<std::ptrdiff_t>((first + 1) * dim));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sqdist(&pts[i * dim], c.data(), dim);
  while (c.size() < k * dim) {
    double total = 0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0) {
      const double u = rng.uniform() * total;
      double acc = 0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc && d2[i] > 0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0 && pick > 0) --pick;  // rounding at the tail
    } else {
      pick = rng.uniform_index(n);
    }
    const std::size_t off = c.size();
    c.insert(c.end(), pts.begin() + static_cast<std::ptrdiff_t>(pick * dim),
             pts.begin() + static_cast<std::ptrdiff_t>((pick + 1) * dim));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sqdist(&pts[i * dim], c.data() + off, dim));
    }
  }
  return c;
}

ClusteringModel lloyd(std::span<const double> pts, std::size_t dim, std::size_t k,
                      std::vector<double> centroids, std::size_t max_iter) {
  const std::size_t n = pts.size() / dim;
  ClusteringModel m;
  m.k = k;
  m.dim = dim;
  m.centroids = std::move(centroids);
  std::vector<std::size_t> assign(n, k);  // k = unassigned
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < std::max<std::size_t>(max_iter, 1); ++it) {
    bool changed = false;
    double inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = nearest_centroid(m, pts.subspan(i * dim, dim));
      inertia += sqdist(&pts[i * dim], &m.centroids[j * dim], dim);
      if (j != assign[i]) {
        assign[i] = j;
        changed = true;
      }
    }
    m.inertia = inertia;
    m.inertia_trace.push_back(inertia);
    m.iterations = it + 1;
    if (!changed) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t q = 0; q < dim; ++q) sums[assign[i] * dim + q] += pts[i * dim + q];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t q = 0; q < dim; ++q) {
        m.centroids[j * dim + q] = sums[j * dim + q] / static_cast<double>(counts[j]);
      }
    }
  }
  // inertia of the final centroids
  double inertia = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nearest_centroid(m, pts.subspan(i * dim, dim));
    inertia += sqdist(&pts[i * dim], &m.centroids[j * dim], dim);
  }
  m.inertia = inertia;
  return m;
}

}  // namespace

std::size_t nearest_centroid(const ClusteringModel& m, std::span<const double> x) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.k; ++j) {
    const double d = sqdist(x.data(), &m.centroids[j * m.dim], m.dim);
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  return best;
}

ClusteringModel kmeans_fit_points(std::span<const double> points, std::size_t dim,
                                  std::size_t k, std::uint64_t seed,
                                  const KMeansOptions& opts) {
  if (dim == 0 || points.empty() || points.size() % dim != 0) {
    throw ShapeError("k-means needs a non-empty n x dim point matrix");
  }
  if (k < 1) throw DataError("k must be >= 1");
  const std::size_t n = points.size() / dim;
  if (count_distinct(points, dim, k) < k) {
    throw DataError("k = " + std::to_string(k) + " exceeds the number of distinct points");
  }
  const std::size_t restarts = std::max<std::size_t>(opts.n_restarts, 1);
  std::vector<ClusteringModel> fits(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    auto rng = rng_stream(seed, "kmeans/" + std::to_string(k) + "/" + std::to_string(r));
    fits[r] = lloyd(points, dim, k, seed_centroids(points, n, dim, k, rng), opts.max_iter);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (fits[r].inertia < fits[best].inertia) best = r;
  }
  return std::move(fits[best]);
}

std::vector<double> timestep_points(const Dataset& d) {
  std::vector<double> pts;
  const std::size_t nc = d.n_channels(), nt = d.n_timesteps();
  for (auto i : d.indices(Split::kTrain)) {
    const auto& s = d[i].series;
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t c = 0; c < nc; ++c) pts.push_back(s.at(c, t));
    }
  }
  return pts;
}

ClusteringModel kmeans_fit(const Dataset& d, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& opts) {
  const auto pts = timestep_points(d);
  if (pts.empty()) throw DataError("k-means needs a non-empty train split");
  return kmeans_fit_points(pts, d.n_channels(), k, seed, opts);
}

Dataset assign_concepts(const ClusteringModel& m, const Dataset& d) {
  if (d.n_channels() != m.dim) {
    throw ShapeError("clustering model has " + std::to_string(m.dim) +
                     " channels, dataset has " + std::to_string(d.n_channels()));
  }
  std::vector<ConceptMask> masks;
  masks.reserve(d.size());
  std::vector<double> x(m.dim);
  for (const auto& s : d.samples()) {
    std::vector<int> labels(s.series.n_timesteps());
    for (std::size_t t = 0; t < labels.size(); ++t) {
      for (std::size_t c = 0; c < m.dim; ++c) x[c] = s.series.at(c, t);
      labels[t] = static_cast<int>(nearest_centroid(m, x)) + 1;
    }
    masks.push_back(ConceptMask::per_timestep(std::move(labels), m.dim,
                                              static_cast<int>(m.k)));
  }
  return d.with_masks(std::move(masks));
}

double inertia_of(const ClusteringModel& m, const Dataset& d) {
  const auto pts = timestep_points(d);
  double s = 0;
  for (std::size_t i = 0; i * m.dim < pts.size(); ++i) {
    const std::span<const double> x(&pts[i * m.dim], m.dim);
    s += sqdist(x.data(), &m.centroids[nearest_centroid(m, x) * m.dim], m.dim);
  }
  return s;
}

ElbowResult elbow_select_points(std::span<const double> points, std::size_t dim,
                                std::size_t k_lo, std::size_t k_hi, std::uint64_t seed,
                                const KMeansOptions& opts, double min_score) {
  if (k_lo < 1 || k_hi > 12 || k_hi < k_lo + 2) {
    throw ConfigError("elbow range must lie in [1, 12] and span at least 3 values");
  }
  ElbowResult r;
  const std::size_t distinct = count_distinct(points, dim, k_hi);
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    r.ks.push_back(k);
    // beyond the distinct-point count every point is its own centroid
    r.inertias.push_back(k <= distinct ? kmeans_fit_points(points, dim, k, seed, opts).inertia
                                       : 0.0);
  }
  const std::size_t n = r.ks.size();
  r.scores.assign(n, std::numeric_limits<double>::quiet_NaN());
  bool decreasing = false;
  for (std::size_t i = 1; i < n; ++i) decreasing |= r.inertias[i] < r.inertias[i - 1];
  if (!decreasing || r.inertias.front() <= 0) {
    r.k_star = k_lo;
    r.warning = true;
    return r;
  }
  // log inertia with a floor far below any meaningful scale
  const double floor = r.inertias.front() * 1e-12;
  std::vector<double> li(n);
  for (std::size_t i = 0; i < n; ++i) li[i] = std::log(r.inertias[i] + floor);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    r.scores[i] = (li[i - 1] - li[i]) - (li[i] - li[i + 1]);
    if (r.scores[i] > best) {
      best = r.scores[i];
      r.k_star = r.ks[i];
    }
  }
  r.warning = best < min_score;
  return r;
}

ElbowResult elbow_select(const Dataset& d, std::size_t k_lo, std::size_t k_hi,
                         std::uint64_t seed, const KMeansOptions& opts, double min_score) {
  const auto pts = timestep_points(d);
  if (pts.empty()) throw DataError("elbow selection needs a non-empty train split");
  return elbow_select_points(pts, d.n_channels(), k_lo, k_hi, seed, opts, min_score);
}

}  // namespace ccts::discovery
