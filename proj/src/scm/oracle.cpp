#include "ccts/scm/oracle.hpp"

#include <array>
#include <cmath>

#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"
#include "ccts/scm/imputers.hpp"

namespace ccts::scm {
namespace {

double log2_ratio(double num, double den, double eps) {
  return std::log2(clamp_probability(num, eps)) - std::log2(clamp_probability(den, eps));
}

SegmentIndex restrict_to_channel(const SegmentIndex& idx, std::optional<std::size_t> ch) {
  if (!ch) return idx;
  std::vector<Position> out;
  for (const auto& p : idx) {
    if (p.channel == *ch) out.push_back(p);
  }
  return SegmentIndex(std::move(out));
}

OracleEffects discrete_effects(const GroundTruth& gt, const LabeledSample& sample,
                               const ProbClassifier& f, int concept_id, int target,
                               const SegmentIndex& region, const SegmentIndex& replaced,
                               double eps) {
  const auto& dc = gt.config.discrete[static_cast<std::size_t>(concept_id - 1)];
  std::vector<double> fj(dc.levels.size());
  for (std::size_t j = 0; j < dc.levels.size(); ++j) {
    std::vector<double> v(replaced.size());
    for (std::size_t i = 0; i < replaced.size(); ++i) v[i] = dc.levels[j][replaced[i].channel];
    fj[j] = f.classify(splice(sample.series, replaced, v));
  }
  const auto expect = [&](int d) {
    const auto& p = d ? dc.p_d1 : dc.p_d0;
    double s = 0;
    for (std::size_t j = 0; j < fj.size(); ++j) s += p[j] * fj[j];
    return s;
  };
  const auto levels = observed_levels(gt, sample, region);
  const double l1 = discrete_log_joint(gt, levels, 1);
  const double l0 = discrete_log_joint(gt, levels, 0);
  if (std::isinf(l1) && std::isinf(l0)) {
    throw DataError("sample '" + sample.sample_id +
                    "': observed levels impossible under both classes");
  }
  const double p1 = sigmoid(l1 - l0);

  OracleEffects r;
  r.f_observed = f.classify(sample.series);
  r.mean_target = expect(target);
  r.mean_baseline = expect(1 - target);
  r.mean_conditional = p1 * expect(1) + (1 - p1) * expect(0);
  r.ite = log2_ratio(r.mean_target, r.mean_baseline, eps);
  r.iaa = log2_ratio(r.f_observed, r.mean_conditional, eps);
  return r;
}

OracleEffects linear_effects(const GroundTruth& gt, const LabeledSample& sample,
                             const ProjectedClassifier& f, int target,
                             const SegmentIndex& region, const SegmentIndex& replaced,
                             const IntegrationOptions& opts, double eps) {
  const auto& W = f.projection();
  const std::size_t r = W.size();
  const std::size_t nt = gt.config.n_timesteps;
  const auto terms = position_terms(gt.config, sample.mask);

  // Projection of the observed part and of the replaced positions' mechanism.
  std::vector<double> y_obs(r, 0.0), wa(r, 0.0), wb(r, 0.0), noise(r * r, 0.0);
  std::vector<std::uint8_t> rep(terms.a.size(), 0);
  for (const auto& p : replaced) rep[p.channel * nt + p.timestep] = 1;
  const auto x = sample.series.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t q = 0; q < r; ++q) {
      const double w = W[q][i];
      if (!rep[i]) {
        y_obs[q] += w * x[i];
        continue;
      }
      wa[q] += w * terms.a[i];
      wb[q] += w * terms.beta[i];
      for (std::size_t s = 0; s < r; ++s) {
        noise[q * r + s] += w * W[s][i] * terms.sd[i] * terms.sd[i];
      }
    }
  }
  // Gaussian moments of the projection given D = d and Z ~ N(zm, zvar).
  const auto moments = [&](int d, double zm, double zvar) {
    std::vector<double> mean(r), cov(noise);
    for (std::size_t q = 0; q < r; ++q) {
      mean[q] = y_obs[q] + wa[q] * d + wb[q] * zm;
      for (std::size_t s = 0; s < r; ++s) cov[q * r + s] += wb[q] * wb[s] * zvar;
    }
    return std::make_pair(mean, cov);
  };
  const auto interventional = [&](int d) {
    auto [m, c] = moments(d, 0.0, 1.0);
    return projected_expectation(f, m, c, opts);
  };

  OracleEffects res;
  res.f_observed = f.classify(sample.series);
  res.mean_target = interventional(target);
  res.mean_baseline = interventional(1 - target);

  const auto& dm = gt.config.disease;
  const auto st = complement_stats(gt, sample, region);
  const double P = 1.0 + st.sbb;
  const double p1 = sigmoid(linear_log_odds(dm, st));
  double cond = 0;
  for (int d = 0; d <= 1; ++d) {
    const double pd = d ? p1 : 1 - p1;
    if (pd == 0) continue;
    const double md = (st.u2 - d * st.sab) / P;
    double e;
    if (dm.weight == 0 || dm.sigma_s == 0) {
      auto [m, c] = moments(d, md, 1.0 / P);
      e = projected_expectation(f, m, c, opts);
    } else {
      // tilt N(md, 1/P) by p(d | z)
      const auto pdz = [&](double z) {
        const double p = p_disease_given_z(dm, z);
        return d ? p : 1 - p;
      };
      const double sd = 1.0 / std::sqrt(P);
      const double norm = gaussian_expectation(pdz, md, sd, {}, opts);
      const double num = gaussian_expectation(
          [&](double z) {
            auto [m, c] = moments(d, z, 0.0);
            return pdz(z) * projected_expectation(f, m, c, opts);
          },
          md, sd, {}, opts);
      e = num / norm;
    }
    cond += pd * e;
  }
  res.mean_conditional = cond;
  res.ite = log2_ratio(res.mean_target, res.mean_baseline, eps);
  res.iaa = log2_ratio(res.f_observed, res.mean_conditional, eps);
  return res;
}

}  // namespace

double projected_expectation(const ProjectedClassifier& f, const std::vector<double>& mean,
                             const std::vector<double>& cov,
                             const IntegrationOptions& opts) {
  const double eps = f.clamp_eps();
  const std::size_t r = mean.size();
  if (r == 1) {
    return gaussian_expectation(
        [&](double y) {
          const std::array<double, 1> z{y};
          return clamp_probability(f.link(z), eps);
        },
        mean[0], std::sqrt(std::max(cov[0], 0.0)), {}, opts);
  }
  if (r != 2) throw UnsupportedError("projection rank must be 1 or 2");
  // eigen-decomposition of the symmetric 2x2 covariance
  const double a = cov[0], b = 0.5 * (cov[1] + cov[2]), c = cov[3];
  const double tr = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double e1 = std::max(tr + disc, 0.0), e2 = std::max(tr - disc, 0.0);
  std::array<double, 2> v1{1.0, 0.0};
  if (b != 0) {
    v1 = {e1 - c, b};
  } else if (c > a) {
    v1 = {0.0, 1.0};
  }
  const double n1 = std::hypot(v1[0], v1[1]);
  v1 = {v1[0] / n1, v1[1] / n1};
  const std::array<double, 2> v2{-v1[1], v1[0]};
  return gaussian_expectation(
      [&](double s1) {
        return gaussian_expectation(
            [&](double s2) {
              const std::array<double, 2> z{mean[0] + v1[0] * s1 + v2[0] * s2,
                                            mean[1] + v1[1] * s1 + v2[1] * s2};
              return clamp_probability(f.link(z), eps);
            },
            0.0, std::sqrt(e2), {}, opts);
      },
      0.0, std::sqrt(e1), {}, opts);
}

OracleEffects brute_force_effects(const GroundTruth& gt, const LabeledSample& sample,
                                  const ProbClassifier& f, int concept_id,
                                  ClassLabel target, std::optional<std::size_t> channel,
                                  const IntegrationOptions& opts, double prob_clamp) {
  if (sample.series.n_channels() != gt.config.n_channels ||
      sample.series.n_timesteps() != gt.config.n_timesteps) {
    throw ShapeError("sample '" + sample.sample_id + "' does not match the SCM shape");
  }
  const SegmentIndex region = segment_index(sample.mask, concept_id);
  if (region.empty()) {
    throw DataError("sample '" + sample.sample_id + "' lacks concept " +
                    std::to_string(concept_id));
  }
  const SegmentIndex replaced = restrict_to_channel(region, channel);
  if (replaced.empty()) {
    throw DataError("concept " + std::to_string(concept_id) + " absent from channel");
  }
  if (gt.config.family == Family::kDiscrete) {
    return discrete_effects(gt, sample, f, concept_id, to_int(target), region, replaced,
                            prob_clamp);
  }
  const auto* pf = dynamic_cast<const ProjectedClassifier*>(&f);
  if (!pf) {
    throw UnsupportedError(
        "linear-gaussian oracle needs a projected classifier (rank <= 2)");
  }
  return linear_effects(gt, sample, *pf, to_int(target), region, replaced, opts,
                        prob_clamp);
}

}  // namespace ccts::scm
