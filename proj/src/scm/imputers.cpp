#include "ccts/scm/imputers.hpp"

#include <cmath>
#include <map>

#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::scm {
namespace {

void check_sample(const GroundTruth& gt, const LabeledSample& s) {
  if (s.series.n_channels() != gt.config.n_channels ||
      s.series.n_timesteps() != gt.config.n_timesteps) {
    throw ShapeError("sample '" + s.sample_id + "' does not match the SCM shape");
  }
}

std::size_t draw_index(const std::vector<double>& p, RandomStream& rng) {
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    acc += p[j];
    if (u < acc) return j;
  }
  for (std::size_t j = p.size(); j-- > 0;) {
    if (p[j] > 0) return j;
  }
  return 0;
}

// Fills idx given the class (and, for linear-gaussian, the latent).
std::vector<double> fill_region(const GroundTruth& gt, const LabeledSample& sample,
                                const SegmentIndex& idx, int d, double z,
                                const std::vector<long>* known_levels,
                                RandomStream& rng) {
  const auto& cfg = gt.config;
  std::vector<double> out(idx.size());
  if (cfg.family == Family::kLinearGaussian) {
    const auto terms = position_terms(cfg, sample.mask);
    const std::size_t nt = cfg.n_timesteps;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t k = idx[i].channel * nt + idx[i].timestep;
      out[i] = terms.a[k] * d + terms.beta[k] * z + terms.sd[k] * rng.normal();
    }
    return out;
  }
  // one level per concept touched by idx, drawn in ascending concept order
  std::map<int, std::size_t> level;
  for (const auto& p : idx) level.emplace(sample.mask.label(p.channel, p.timestep), 0);
  for (auto& [c, j] : level) {
    const long known = known_levels ? (*known_levels)[static_cast<std::size_t>(c - 1)] : -1;
    const auto& dc = cfg.discrete[static_cast<std::size_t>(c - 1)];
    j = known >= 0 ? static_cast<std::size_t>(known) : draw_index(d ? dc.p_d1 : dc.p_d0, rng);
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int c = sample.mask.label(idx[i].channel, idx[i].timestep);
    out[i] = cfg.discrete[static_cast<std::size_t>(c - 1)].levels[level[c]][idx[i].channel];
  }
  return out;
}

}  // namespace

LinearStats complement_stats(const GroundTruth& gt, const LabeledSample& sample,
                             const SegmentIndex& idx) {
  const auto terms = position_terms(gt.config, sample.mask);
  const std::size_t nt = gt.config.n_timesteps;
  std::vector<std::uint8_t> in_idx(terms.a.size(), 0);
  for (const auto& p : idx) in_idx[p.channel * nt + p.timestep] = 1;
  LinearStats s;
  const auto values = sample.series.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_idx[i]) continue;
    const double l = terms.lambda[i];
    s.u1 += l * terms.a[i] * values[i];
    s.u2 += l * terms.beta[i] * values[i];
    s.saa += l * terms.a[i] * terms.a[i];
    s.sab += l * terms.a[i] * terms.beta[i];
    s.sbb += l * terms.beta[i] * terms.beta[i];
  }
  return s;
}

std::vector<long> observed_levels(const GroundTruth& gt, const LabeledSample& sample,
                                  const SegmentIndex& idx) {
  std::vector<long> out;
  for (int c = 1; c <= gt.config.n_concepts; ++c) {
    std::vector<Position> seen;
    for (const auto& p : segment_index(sample.mask, c)) {
      if (!idx.contains(p)) seen.push_back(p);
    }
    if (seen.empty()) {
      out.push_back(-1);
    } else {
      out.push_back(static_cast<long>(
          nearest_level(gt.config.discrete[static_cast<std::size_t>(c - 1)],
                        sample.series, seen)));
    }
  }
  return out;
}

double discrete_log_joint(const GroundTruth& gt, const std::vector<long>& levels, int d) {
  double l = d ? std::log(gt.prior) : std::log1p(-gt.prior);
  for (std::size_t c = 0; c < levels.size(); ++c) {
    if (levels[c] < 0) continue;
    const auto& dc = gt.config.discrete[c];
    l += std::log((d ? dc.p_d1 : dc.p_d0)[static_cast<std::size_t>(levels[c])]);
  }
  return l;
}

InterventionalImputer::InterventionalImputer(GroundTruth gt, ClassLabel d)
    : gt_(std::move(gt)), d_(d) {}

std::vector<double> InterventionalImputer::impute(const LabeledSample& sample,
                                                  const SegmentIndex& idx,
                                                  RandomStream& rng) const {
  check_sample(gt_, sample);
  if (idx.empty()) return {};
  const double z = gt_.config.family == Family::kLinearGaussian ? rng.normal() : 0.0;
  return fill_region(gt_, sample, idx, to_int(d_), z, nullptr, rng);
}

ConditionalImputer::ConditionalImputer(GroundTruth gt, std::size_t max_rejections)
    : gt_(std::move(gt)), max_rejections_(max_rejections) {}

double ConditionalImputer::posterior_target(const LabeledSample& sample,
                                            const SegmentIndex& idx) const {
  check_sample(gt_, sample);
  if (gt_.config.family == Family::kLinearGaussian) {
    return sigmoid(linear_log_odds(gt_.config.disease, complement_stats(gt_, sample, idx)));
  }
  const auto levels = observed_levels(gt_, sample, idx);
  const double l1 = discrete_log_joint(gt_, levels, 1);
  const double l0 = discrete_log_joint(gt_, levels, 0);
  if (std::isinf(l1) && std::isinf(l0)) {
    throw DataError("sample '" + sample.sample_id +
                    "': observed levels impossible under both classes");
  }
  return sigmoid(l1 - l0);
}

std::vector<double> ConditionalImputer::impute(const LabeledSample& sample,
                                               const SegmentIndex& idx,
                                               RandomStream& rng) const {
  check_sample(gt_, sample);
  if (idx.empty()) return {};
  const double p1 = posterior_target(sample, idx);
  const int d = rng.uniform() < p1 ? 1 : 0;
  if (gt_.config.family == Family::kDiscrete) {
    const auto levels = observed_levels(gt_, sample, idx);
    return fill_region(gt_, sample, idx, d, 0.0, &levels, rng);
  }
  // Z | d, complement has density N(m_d, 1/P) * p(d | z) (normalized).
  const auto s = complement_stats(gt_, sample, idx);
  const double P = 1.0 + s.sbb;
  const double m = (s.u2 - d * s.sab) / P;
  const double sd = 1.0 / std::sqrt(P);
  const auto& dm = gt_.config.disease;
  double z = m + sd * rng.normal();
  if (dm.weight != 0 && dm.sigma_s != 0) {
    std::size_t tries = 1;
    for (;;) {
      const double p = p_disease_given_z(dm, z);
      if (rng.uniform() < (d ? p : 1.0 - p)) break;
      if (++tries > max_rejections_) {
        throw DataError("sample '" + sample.sample_id +
                        "': latent rejection sampling exceeded its budget");
      }
      z = m + sd * rng.normal();
    }
  }
  return fill_region(gt_, sample, idx, d, z, nullptr, rng);
}

}  // namespace ccts::scm
