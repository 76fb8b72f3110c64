#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ccts/classifier/prob_classifier.hpp"
#include "ccts/core/segment.hpp"
#include "ccts/scm/config.hpp"

namespace ccts::scm {

// Minimum per-position noise scale used in likelihoods; noise-free positions
// are treated as having this scale so that posteriors stay finite.
inline constexpr double kSigmaFloor = 1e-3;

// Per-position mechanism coefficients for a given mask, channel-major:
// x_i = a_i * D + beta_i * Z + sd_i * eps_i with Z ~ N(0, 1).
struct PositionTerms {
  std::vector<double> a, beta, sd;
  std::vector<double> lambda;  // 1 / max(sd, floor)^2
};
PositionTerms position_terms(const SCMConfig& cfg, const ConceptMask& mask);

// Sufficient statistics of a set of observed positions.
struct LinearStats {
  double u1 = 0, u2 = 0;           // sum lambda a x, sum lambda beta x
  double saa = 0, sab = 0, sbb = 0;  // sums of lambda a^2, lambda a beta, lambda beta^2
};

// p(D = 1 | Z = z).
double p_disease_given_z(const DiseaseMechanism& dm, double z);
// log E[p(D = d | Z)] for Z ~ N(mean, var).
double log_expected_p(const DiseaseMechanism& dm, int d, double mean, double var);
// P(D = 1).
double disease_prior(const DiseaseMechanism& dm);
// log p(D = 1 | obs) - log p(D = 0 | obs) for linear-gaussian observations.
double linear_log_odds(const DiseaseMechanism& dm, const LinearStats& s);

// Closed-form posterior parameters tied to the jitter-free mask.
struct GroundTruth {
  SCMConfig config;
  ConceptMask mask;
  double prior = 0.5;
  // Linear-gaussian family: projection rows and constants of the posterior.
  std::vector<double> row_a, row_b;
  double saa = 0, sab = 0, sbb = 0;
};
GroundTruth make_ground_truth(const SCMConfig& cfg);

// Index of the level closest (mean squared distance) to the values of
// `series` at `positions`; ties go to the lowest index.
std::size_t nearest_level(const DiscreteConcept& dc, const MultivariateSeries& series,
                          std::span<const Position> positions);

// f(X) = p(D = 1 | X) as a function of the projections
// u1 = sum lambda a x and u2 = sum lambda beta x.
class LinearGaussianBayes final : public ProjectedClassifier {
 public:
  explicit LinearGaussianBayes(const GroundTruth& gt, double eps = kDefaultProbClamp);
  double link(std::span<const double> z) const override;
  std::string name() const override { return "bayes-linear-gaussian"; }

 private:
  DiseaseMechanism dm_;
  double saa_, sab_, sbb_;
};

// f(X) = p(D = 1 | identified levels) via Bayes' rule over the tables.
class DiscreteBayes final : public ProbClassifier {
 public:
  explicit DiscreteBayes(const GroundTruth& gt, double eps = kDefaultProbClamp);
  double classify(const MultivariateSeries& x) const override;
  std::string name() const override { return "bayes-discrete"; }

 private:
  GroundTruth gt_;
  std::vector<SegmentIndex> regions_;
  double eps_;
};

// The exact posterior classifier of the SCM (on the jitter-free mask).
std::unique_ptr<ProbClassifier> bayes_classifier(const GroundTruth& gt,
                                                 double eps = kDefaultProbClamp);

}  // namespace ccts::scm
