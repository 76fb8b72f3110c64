#include "ccts/imputer/donor.hpp"

#include "ccts/core/error.hpp"

namespace ccts::imputer {
namespace {

constexpr int kMaxDonorAttempts = 50;

// Fills `out` from `donor`; false when some position has no same-concept
// timestep on its channel in the donor.
bool copy_from_donor(const LabeledSample& donor, const LabeledSample& sample,
                     const SegmentIndex& idx, std::vector<double>& out) {
  const auto& dm = donor.mask;
  const std::size_t nt = donor.series.n_timesteps();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto [ch, t] = idx[i];
    const int c = sample.mask.label(ch, t);
    if (t < nt && dm.label(ch, t) == c) {
      out[i] = donor.series.at(ch, t);
      continue;
    }
    bool found = false;
    for (std::size_t d = 1; d < nt + t && !found; ++d) {
      if (t >= d && t - d < nt && dm.label(ch, t - d) == c) {
        out[i] = donor.series.at(ch, t - d);
        found = true;
      } else if (t + d < nt && dm.label(ch, t + d) == c) {
        out[i] = donor.series.at(ch, t + d);
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

DonorPool donor_fit(const Dataset& d, std::optional<ClassLabel> label_filter) {
  DonorPool pool;
  pool.label = label_filter;
  for (auto i : d.indices(Split::kTrain, label_filter)) pool.donors.push_back(d[i]);
  if (pool.donors.empty()) {
    throw DataError(label_filter ? "donor pool for label " +
                                       std::to_string(to_int(*label_filter)) +
                                       " is empty"
                                 : "donor pool is empty");
  }
  return pool;
}

std::vector<double> donor_impute(const DonorPool& pool, const LabeledSample& sample,
                                 const SegmentIndex& idx, RandomStream& rng) {
  std::vector<double> out(idx.size());
  if (idx.empty()) return out;
  if (pool.donors.empty()) throw DataError("donor pool is empty");
  for (int attempt = 0; attempt < kMaxDonorAttempts; ++attempt) {
    const auto& donor = pool.donors[rng.uniform_index(pool.donors.size())];
    if (donor.series.n_channels() != sample.series.n_channels()) {
      throw ShapeError("donor channel count differs from sample");
    }
    if (copy_from_donor(donor, sample, idx, out)) return out;
  }
  throw DataError("no donor carrying the concept of sample '" + sample.sample_id +
                  "' after " + std::to_string(kMaxDonorAttempts) + " draws");
}

}  // namespace ccts::imputer
