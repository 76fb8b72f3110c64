#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace ccts {

// Counter-based random stream (Philox-4x32-10) keyed by (seed, stream_id).
//
// A stream is a pure function of its key and an internal block counter, so
// the draws of a given (seed, stream_id) never depend on which thread runs
// it or what other streams did first. Child streams are derived by name.
//
// Satisfies UniformRandomBitGenerator, but library code only uses the
// distribution helpers below: their outputs are fixed by this implementation
// and do not vary across standard libraries.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // Standard logistic variate.
  double logistic();

  // Independent child stream named `name` (derived from this stream's key,
  // not from its current position).
  RandomStream substream(std::string_view name) const;
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& stream_id() const noexcept { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::string stream_id_;
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
};

// Shorthand for the stream constructor.
inline RandomStream rng_stream(std::uint64_t seed, std::string_view stream_id) {
  return RandomStream(seed, stream_id);
}

}  // namespace ccts
