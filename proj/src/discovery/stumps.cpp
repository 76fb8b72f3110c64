#include "ccts/discovery/stumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::discovery {
namespace {

double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace

BoostedStumps BoostedStumps::fit(const std::vector<double>& X, std::size_t n_features,
                                 const std::vector<int>& y, const StumpsOptions& opts) {
  const std::size_t n = y.size();
  if (n == 0 || n_features == 0 || X.size() != n * n_features) {
    throw ShapeError("stumps: feature matrix does not match the labels");
  }
  BoostedStumps model;
  model.n_features_ = n_features;
  model.lr_ = opts.learning_rate;
  const double pos = std::accumulate(y.begin(), y.end(), 0.0);
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1 - 1e-6);
  model.base_ = std::log(prior / (1 - prior));

  // presorted non-missing rows per feature
  std::vector<std::vector<std::size_t>> order(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isnan(X[i * n_features + f])) order[f].push_back(i);
    }
    std::stable_sort(order[f].begin(), order[f].end(), [&](std::size_t a, std::size_t b) {
      return X[a * n_features + f] < X[b * n_features + f];
    });
  }

  std::vector<double> margin(n, model.base_), g(n), h(n);
  for (std::size_t round = 0; round < opts.rounds; ++round) {
    double G = 0, H = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - y[i];
      h[i] = std::max(p * (1 - p), 1e-16);
      G += g[i];
      H += h[i];
    }
    const double parent = leaf_score(G, H, opts.lambda);
    double best_gain = 0;
    Stump best;
    bool found = false;
    for (std::size_t f = 0; f < n_features; ++f) {
      const auto& ord = order[f];
      double gp = 0, hp = 0;  // present rows
      for (auto i : ord) {
        gp += g[i];
        hp += h[i];
      }
      const double gm = G - gp, hm = H - hp;  // missing rows
      double gl = 0, hl = 0;
      for (std::size_t r = 0; r + 1 < ord.size(); ++r) {
        gl += g[ord[r]];
        hl += h[ord[r]];
        const double a = X[ord[r] * n_features + f];
        const double b = X[ord[r + 1] * n_features + f];
        if (!(a < b)) continue;
        const double gr = gp - gl, hr = hp - hl;
        for (bool ml : {true, false}) {
          const double GL = gl + (ml ? gm : 0), HL = hl + (ml ? hm : 0);
          const double GR = gr + (ml ? 0 : gm), HR = hr + (ml ? 0 : hm);
          const double gain = leaf_score(GL, HL, opts.lambda) +
                              leaf_score(GR, HR, opts.lambda) - parent;
          if (gain > best_gain + 1e-12) {
            best_gain = gain;
            found = true;
            best.feature = f;
            best.threshold = a + 0.5 * (b - a);
            best.missing_left = ml;
            best.left = -GL / (HL + opts.lambda);
            best.right = -GR / (HR + opts.lambda);
          }
        }
      }
      // all present rows on one side, missing rows on the other
      if (!ord.empty() && hm > 0) {
        const double gain = leaf_score(gp, hp, opts.lambda) +
                            leaf_score(gm, hm, opts.lambda) - parent;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          found = true;
          best.feature = f;
          best.threshold = std::numeric_limits<double>::infinity();
          best.missing_left = false;
          best.left = -gp / (hp + opts.lambda);
          best.right = -gm / (hm + opts.lambda);
        }
      }
    }
    if (!found) break;  // no split improves the loss
    model.stumps_.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = X[i * n_features + best.feature];
      const bool left = std::isnan(v) ? best.missing_left : v < best.threshold;
      margin[i] += opts.learning_rate * (left ? best.left : best.right);
    }
  }
  return model;
}

double BoostedStumps::margin(const double* row) const {
  double m = base_;
  for (const auto& s : stumps_) {
    const double v = row[s.feature];
    const bool left = std::isnan(v) ? s.missing_left : v < s.threshold;
    m += lr_ * (left ? s.left : s.right);
  }
  return m;
}

double BoostedStumps::predict_proba(const double* row) const { return sigmoid(margin(row)); }

std::vector<double> BoostedStumps::predict_proba(const std::vector<double>& X) const {
  if (X.size() % n_features_ != 0) throw ShapeError("stumps: bad feature matrix width");
  std::vector<double> out(X.size() / n_features_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_proba(&X[i * n_features_]);
  return out;
}

}  // namespace ccts::discovery
