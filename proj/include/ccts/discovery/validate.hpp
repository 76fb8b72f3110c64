#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccts/classifier/metrics.hpp"
#include "ccts/core/dataset.hpp"
#include "ccts/discovery/stumps.hpp"

namespace ccts::discovery {

// Per-sample feature vector: the six concept statistics for every
// (channel, concept), concept-major. Absent concepts contribute NaN (missing)
// statistics and a zero count.
std::vector<double> concept_features(const LabeledSample& s, int n_concepts);
std::vector<std::string> concept_feature_names(const std::vector<std::string>& channels,
                                               int n_concepts);

struct ConceptValidation {
  classifier::BootstrapInterval auroc;  // point estimate and 95% interval
  std::size_t n_train = 0, n_test = 0;
  std::size_t n_features = 0;
};

// Trains boosted stumps on the train split's concept features and scores the
// test split. The interval comes from `B` bootstrap resamples of the test
// set. Throws DataError when a split is empty or single-class.
ConceptValidation validate_concepts(const Dataset& d, std::uint64_t seed,
                                    const StumpsOptions& opts = {}, std::size_t B = 1000,
                                    double level = 0.95);

}  // namespace ccts::discovery
