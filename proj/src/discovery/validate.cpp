#include "ccts/discovery/validate.hpp"

#include <limits>

#include "ccts/core/error.hpp"
#include "ccts/discovery/concept_stats.hpp"

namespace ccts::discovery {
namespace {

void table(const Dataset& d, Split split, int C, std::vector<double>& X, std::vector<int>& y) {
  for (auto i : d.indices(split)) {
    const auto f = concept_features(d[i], C);
    X.insert(X.end(), f.begin(), f.end());
    y.push_back(to_int(d[i].label));
  }
}

void require_two_classes(const std::vector<int>& y, const char* split) {
  bool has0 = false, has1 = false;
  for (int v : y) (v ? has1 : has0) = true;
  if (!has0 || !has1) {
    throw DataError(std::string(split) + " split must contain both classes");
  }
}

}  // namespace

std::vector<double> concept_features(const LabeledSample& s, int n_concepts) {
  const auto rows = concept_stats(s, true);
  const std::size_t nc = s.series.n_channels();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> f(static_cast<std::size_t>(n_concepts) * nc * 6, nan);
  for (const auto& r : rows) {
    if (r.concept_id > n_concepts) continue;
    const std::size_t base =
        (static_cast<std::size_t>(r.concept_id - 1) * nc + *r.channel) * 6;
    if (!r.absent) {
      f[base + 0] = r.min;
      f[base + 1] = r.max;
      f[base + 2] = r.mean;
      f[base + 3] = r.std;
      f[base + 4] = r.median;
    }
    f[base + 5] = static_cast<double>(r.count);
  }
  // concepts beyond the sample's own C are absent
  for (int c = s.mask.n_concepts() + 1; c <= n_concepts; ++c) {
    for (std::size_t ch = 0; ch < nc; ++ch) {
      f[(static_cast<std::size_t>(c - 1) * nc + ch) * 6 + 5] = 0.0;
    }
  }
  return f;
}

std::vector<std::string> concept_feature_names(const std::vector<std::string>& channels,
                                               int n_concepts) {
  std::vector<std::string> out;
  for (int c = 1; c <= n_concepts; ++c) {
    for (const auto& ch : channels) {
      for (const char* stat : {"min", "max", "mean", "std", "median", "count"}) {
        out.push_back("c" + std::to_string(c) + "/" + ch + "/" + stat);
      }
    }
  }
  return out;
}

ConceptValidation validate_concepts(const Dataset& d, std::uint64_t seed,
                                    const StumpsOptions& opts, std::size_t B, double level) {
  const int C = d.n_concepts();
  std::vector<double> Xtr, Xte;
  std::vector<int> ytr, yte;
  table(d, Split::kTrain, C, Xtr, ytr);
  table(d, Split::kTest, C, Xte, yte);
  if (ytr.empty() || yte.empty()) throw DataError("train and test splits must be non-empty");
  require_two_classes(ytr, "train");
  require_two_classes(yte, "test");
  const std::size_t nf = Xtr.size() / ytr.size();
  const auto model = BoostedStumps::fit(Xtr, nf, ytr, opts);
  const auto scores = model.predict_proba(Xte);
  ConceptValidation v;
  v.auroc = classifier::bootstrap_metric(scores, yte, B, level, seed);
  v.n_train = ytr.size();
  v.n_test = yte.size();
  v.n_features = nf;
  return v;
}

}  // namespace ccts::discovery
