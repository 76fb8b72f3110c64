#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ccts/core/series.hpp"

namespace ccts {

struct Position {
  std::size_t channel = 0;
  std::size_t timestep = 0;
  friend auto operator<=>(const Position&, const Position&) = default;
};

// Positions of one concept region, sorted channel-major then by timestep.
// Replacement values passed to `splice` are aligned to this order.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  // Sorts and deduplicates.
  explicit SegmentIndex(std::vector<Position> positions);

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  const Position& operator[](std::size_t i) const { return positions_[i]; }
  auto begin() const noexcept { return positions_.begin(); }
  auto end() const noexcept { return positions_.end(); }
  const std::vector<Position>& positions() const noexcept { return positions_; }

  bool contains(const Position& p) const;

  friend bool operator==(const SegmentIndex&, const SegmentIndex&) = default;

 private:
  std::vector<Position> positions_;
};

// All positions where `mask` equals `concept_id`, optionally restricted to a
// single channel. Empty when the concept is absent. Throws DataError when the
// concept is outside 1..C and ShapeError when the channel is out of bounds.
SegmentIndex segment_index(const ConceptMask& mask, int concept_id,
                           std::optional<std::size_t> channel = std::nullopt);

// Values of `series` at `idx`, in index order.
std::vector<double> extract(const MultivariateSeries& series,
                            const SegmentIndex& idx);

// Copy of `base` with `replacement` written at `idx`. Throws ShapeError on a
// length mismatch or out-of-bounds position.
MultivariateSeries splice(const MultivariateSeries& base,
                          const SegmentIndex& idx,
                          std::span<const double> replacement);

}  // namespace ccts
