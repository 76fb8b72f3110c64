#include "ccts/core/rng.hpp"

#include <cmath>

namespace ccts {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

void philox_round(std::array<std::uint32_t, 4>& ctr,
                  const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::string_view stream_id)
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t h = fnv1a(stream_id, 0xCBF29CE484222325ull);
  const std::uint64_t k = splitmix(seed ^ splitmix(h));
  const std::uint64_t hi = splitmix(k ^ 0x5851F42D4C957F2Dull ^ h);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  // The upper counter words hold more key material; the lower words count.
  counter_ = {0u, 0u, static_cast<std::uint32_t>(hi),
              static_cast<std::uint32_t>(hi >> 32)};
}

void RandomStream::refill() {
  std::array<std::uint32_t, 4> ctr = counter_;
  std::array<std::uint32_t, 2> key = key_;
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  block_ = ctr;
  block_pos_ = 0;
  if (++counter_[0] == 0) ++counter_[1];
}

std::uint64_t RandomStream::next_u64() {
  if (block_pos_ >= 4) refill();
  const std::uint64_t lo = block_[static_cast<std::size_t>(block_pos_)];
  const std::uint64_t hi = block_[static_cast<std::size_t>(block_pos_ + 1)];
  block_pos_ += 2;
  return (hi << 32) | lo;
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  // Rejection sampling on the largest multiple of n.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double RandomStream::normal() {
  // Box-Muller; one variate per call keeps the stream position simple.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RandomStream::logistic() {
  const double u = uniform();
  return std::log(u / (1.0 - u));
}

RandomStream RandomStream::substream(std::string_view name) const {
  std::string id = stream_id_;
  id += '/';
  id += name;
  return RandomStream(seed_, id);
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return substream(std::to_string(index));
}

}  // namespace ccts
