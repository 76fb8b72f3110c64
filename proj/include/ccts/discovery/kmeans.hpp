#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ccts/core/dataset.hpp"

namespace ccts::discovery {

struct ClusteringModel {
  std::size_t k = 0;
  std::size_t dim = 0;              // n_channels
  std::vector<double> centroids;    // k x dim, row-major
  double inertia = 0;               // sum of squared distances to the assigned centroid
  std::size_t iterations = 0;
  std::vector<double> inertia_trace;  // inertia after each assignment step (best restart)

  std::span<const double> centroid(std::size_t j) const {
    return {centroids.data() + j * dim, dim};
  }
};

struct KMeansOptions {
  std::size_t n_restarts = 10;
  std::size_t max_iter = 300;
};

// Lloyd's algorithm with k-means++ seeding on `points` (n x dim, row-major);
// the restart with the lowest inertia wins (lowest restart index on ties).
// Restart r uses stream (seed, "kmeans/<k>/<r>"). Throws DataError when k
// exceeds the number of distinct points or k < 1.
ClusteringModel kmeans_fit_points(std::span<const double> points, std::size_t dim,
                                  std::size_t k, std::uint64_t seed,
                                  const KMeansOptions& opts = {});

// Clusters the per-timestep cross-channel vectors of the train split.
ClusteringModel kmeans_fit(const Dataset& d, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& opts = {});

// Nearest centroid (squared Euclidean), ties to the lowest index. 0-based.
std::size_t nearest_centroid(const ClusteringModel& m, std::span<const double> x);

// Replaces every mask with the per-timestep nearest-centroid labeling
// (concept j + 1 for centroid j, C = k, channel-agnostic).
Dataset assign_concepts(const ClusteringModel& m, const Dataset& d);

// Sum of squared distances of the train-split timestep vectors to their
// nearest centroid.
double inertia_of(const ClusteringModel& m, const Dataset& d);

struct ElbowResult {
  std::size_t k_star = 1;
  std::vector<std::size_t> ks;
  std::vector<double> inertias;
  std::vector<double> scores;  // curvature score per interior k (NaN at the ends)
  bool warning = false;        // flat or degenerate curve
};

// Fits every k in [k_lo, k_hi] and picks the interior k maximizing the second
// difference of log inertia (ties to the smallest k). A curve that never
// decreases returns k_lo with the warning set; a best score below
// `min_score` also sets the warning.
ElbowResult elbow_select_points(std::span<const double> points, std::size_t dim,
                                std::size_t k_lo, std::size_t k_hi, std::uint64_t seed,
                                const KMeansOptions& opts = {}, double min_score = 1.0);
ElbowResult elbow_select(const Dataset& d, std::size_t k_lo, std::size_t k_hi,
                         std::uint64_t seed, const KMeansOptions& opts = {},
                         double min_score = 1.0);

// Per-timestep cross-channel vectors of the train split, row-major.
std::vector<double> timestep_points(const Dataset& d);

}  // namespace ccts::discovery
