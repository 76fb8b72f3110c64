#include "ccts/scm/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccts/core/error.hpp"
#include "ccts/core/quadrature.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::scm {
namespace {

constexpr std::size_t kGaussHermiteOrder = 32;

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// log Phi(x) without underflow for very negative x.
double log_normal_cdf(double x) {
  if (x > -30) return std::log(normal_cdf(x));
  // Mills-ratio asymptotics.
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2 * M_PI);
}

double log_sum_exp(std::span<const double> v, std::span<const double> w) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::exp(v[i] - mx);
  return mx + std::log(s);
}

}  // namespace

PositionTerms position_terms(const SCMConfig& cfg, const ConceptMask& mask) {
  const std::size_t nc = cfg.n_channels, nt = cfg.n_timesteps;
  PositionTerms p;
  p.a.assign(nc * nt, 0.0);
  p.beta.assign(nc * nt, 0.0);
  p.sd.assign(nc * nt, 0.0);
  p.lambda.assign(nc * nt, 0.0);
  for (std::size_t k = 0; k < nc; ++k) {
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t i = k * nt + t;
      const int c = mask.label(k, t);
      if (cfg.family == Family::kLinearGaussian) {
        const auto& m = cfg.linear.at(static_cast<std::size_t>(c - 1));
        p.a[i] = m.a[k];
        p.beta[i] = m.b[k] * cfg.disease.sigma_s;
        p.sd[i] = std::hypot(m.sigma[k], cfg.sigma_x);
      }
      const double s = std::max(p.sd[i], kSigmaFloor);
      p.lambda[i] = 1.0 / (s * s);
    }
  }
  return p;
}

double p_disease_given_z(const DiseaseMechanism& dm, double z) {
  const double g = dm.bias + dm.weight * dm.sigma_s * z;
  if (dm.sigma_d > 0) return sigmoid(g / dm.sigma_d);
  return g > 0 ? 1.0 : 0.0;
}

double log_expected_p(const DiseaseMechanism& dm, int d, double mean, double var) {
  const double sign = d == 1 ? 1.0 : -1.0;
  const double slope = dm.weight * dm.sigma_s;
  const double sd = std::sqrt(std::max(var, 0.0));
  if (dm.sigma_d == 0) {
    // g = bias + slope * Z ~ N(bias + slope * mean, (slope * sd)^2)
    const double gm = dm.bias + slope * mean;
    const double gs = std::abs(slope) * sd;
    if (gs == 0) {
      const bool one = gm > 0;
      return (one == (d == 1)) ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return log_normal_cdf(sign * gm / gs);
  }
  if (slope == 0 || sd == 0) {
    return log_sigmoid(sign * (dm.bias + slope * mean) / dm.sigma_d);
  }
  const auto& rule = gauss_hermite(kGaussHermiteOrder);
  std::vector<double> logs(rule.nodes.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double z = mean + sd * rule.nodes[i];
    logs[i] = log_sigmoid(sign * (dm.bias + slope * z) / dm.sigma_d);
  }
  return log_sum_exp(logs, rule.weights);
}

double disease_prior(const DiseaseMechanism& dm) {
  // Computed once per model, so integrate adaptively rather than with the
  // fixed rule used per classification.
  if (dm.sigma_d == 0) return std::exp(log_expected_p(dm, 1, 0.0, 1.0));
  return gaussian_expectation(
      [&](double z) { return sigmoid((dm.bias + dm.weight * dm.sigma_s * z) / dm.sigma_d); },
      0.0, 1.0);
}

double linear_log_odds(const DiseaseMechanism& dm, const LinearStats& s) {
  const double P = 1.0 + s.sbb;
  const double u_1 = s.u2 - s.sab;  // beta-projection residual under D = 1
  const double u_0 = s.u2;
  const double lik = s.u1 - 0.5 * s.saa + 0.5 * (u_1 * u_1 - u_0 * u_0) / P;
  const double l1 = log_expected_p(dm, 1, u_1 / P, 1.0 / P);
  const double l0 = log_expected_p(dm, 0, u_0 / P, 1.0 / P);
  if (std::isinf(l1) && std::isinf(l0)) {
    throw DataError("observations are impossible under both classes");
  }
  return lik + l1 - l0;
}

GroundTruth make_ground_truth(const SCMConfig& cfg) {
  cfg.validate();
  GroundTruth gt;
  gt.config = cfg;
  gt.mask = canonical_mask(cfg);
  gt.prior = disease_prior(cfg.disease);
  if (cfg.family == Family::kLinearGaussian) {
    const auto p = position_terms(cfg, gt.mask);
    const std::size_t n = p.a.size();
    gt.row_a.resize(n);
    gt.row_b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt.row_a[i] = p.lambda[i] * p.a[i];
      gt.row_b[i] = p.lambda[i] * p.beta[i];
      gt.saa += p.lambda[i] * p.a[i] * p.a[i];
      gt.sab += p.lambda[i] * p.a[i] * p.beta[i];
      gt.sbb += p.lambda[i] * p.beta[i] * p.beta[i];
    }
  }
  return gt;
}

std::size_t nearest_level(const DiscreteConcept& dc, const MultivariateSeries& series,
                          std::span<const Position> positions) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dc.levels.size(); ++j) {
    double d = 0;
    for (const auto& p : positions) {
      const double e = series.at(p.channel, p.timestep) - dc.levels[j][p.channel];
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

LinearGaussianBayes::LinearGaussianBayes(const GroundTruth& gt, double eps)
    : ProjectedClassifier(gt.config.n_channels, gt.config.n_timesteps,
                          {gt.row_a, gt.row_b}, eps),
      dm_(gt.config.disease),
      saa_(gt.saa),
      sab_(gt.sab),
      sbb_(gt.sbb) {
  if (gt.config.family != Family::kLinearGaussian) {
    throw ConfigError("linear-gaussian Bayes classifier needs the linear family");
  }
}

double LinearGaussianBayes::link(std::span<const double> z) const {
  LinearStats s{z[0], z[1], saa_, sab_, sbb_};
  return sigmoid(linear_log_odds(dm_, s));
}

DiscreteBayes::DiscreteBayes(const GroundTruth& gt, double eps) : gt_(gt), eps_(eps) {
  if (gt.config.family != Family::kDiscrete) {
    throw ConfigError("discrete Bayes classifier needs the discrete family");
  }
  for (int c = 1; c <= gt.config.n_concepts; ++c) {
    regions_.push_back(segment_index(gt.mask, c));
  }
}

double DiscreteBayes::classify(const MultivariateSeries& x) const {
  if (x.n_channels() != gt_.config.n_channels ||
      x.n_timesteps() != gt_.config.n_timesteps) {
    throw ShapeError("series shape does not match the SCM");
  }
  double l1 = std::log(gt_.prior), l0 = std::log1p(-gt_.prior);
  for (std::size_t c = 0; c < regions_.size(); ++c) {
    if (regions_[c].empty()) continue;
    const auto& dc = gt_.config.discrete[c];
    const std::size_t j = nearest_level(dc, x, regions_[c].positions());
    l1 += std::log(dc.p_d1[j]);
    l0 += std::log(dc.p_d0[j]);
  }
  double p;
  if (std::isinf(l1) && std::isinf(l0)) {
    p = 0.5;  // levels impossible under both classes
  } else {
    p = sigmoid(l1 - l0);
  }
  return clamp_probability(p, eps_);
}

std::unique_ptr<ProbClassifier> bayes_classifier(const GroundTruth& gt, double eps) {
  if (gt.config.family == Family::kLinearGaussian) {
    return std::make_unique<LinearGaussianBayes>(gt, eps);
  }
  return std::make_unique<DiscreteBayes>(gt, eps);
}

}  // namespace ccts::scm
