#ifndef SEQDENOISE_RNG_HPP_
#define SEQDENOISE_RNG_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace seqdenoise {

// splitmix64 step; used for seeding and for deriving per-item seed streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives an independent seed for stream `stream` of a base seed. Every
// parallel or per-item RNG in the project is seeded through this, so results
// never depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// xoshiro256** with explicit seeding. Implementation-defined std::
// distributions are avoided on purpose: every draw here is reproducible
// bit-for-bit from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s = splitmix64(s);
      w = s;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 bits of randomness.
  double next_real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_real(double lo, double hi) { return lo + (hi - lo) * next_real01(); }

  // Unbiased uniform draw from {0, ..., n-1}.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // k distinct indices from {0, ..., n-1}, returned in ascending order
  // (Floyd's algorithm).
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k) {
    std::vector<bool> taken(n, false);
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::uint32_t i = n - k; i < n; ++i) {
      const auto j = static_cast<std::uint32_t>(next_below(i + 1));
      if (taken[j]) {
        taken[i] = true;
        out.push_back(i);
      } else {
        taken[j] = true;
        out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace seqdenoise

#endif  // SEQDENOISE_RNG_HPP_
