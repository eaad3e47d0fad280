#pragma once

#include <cstdint>
#include <limits>

namespace hcantor {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Reproducible random stream identified by (seed, stream_index).
// xoshiro256++ seeded through splitmix64 of both values; distinct indices
// give decorrelated streams. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), index_(stream_index) {
    std::uint64_t sm = seed ^ 0x5851f42d4c957f2dull;
    std::uint64_t mix = splitmix64(sm) ^ stream_index;
    // The state comes from a second splitmix64 stream seeded by the mix.
    std::uint64_t sm2 = mix;
    for (auto& word : s_) word = splitmix64(sm2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return index_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t s_[4];
};

}  // namespace hcantor
