#ifndef WALKCAST_RNG_HPP
#define WALKCAST_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace walkcast {

// Deterministic random source. std::mt19937_64 is fully specified by the
// standard, so identical seeds give identical streams on every platform.
// The std:: distribution adapters are implementation-defined and therefore
// not used; the conversions below are spelled out instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). Modulo bias is irrelevant next to the 2^64
  // range and keeps the mapping trivially portable.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  // Fisher-Yates shuffle with a fixed traversal order.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent member/worker seeds from
// (seed, index) pairs without overlapping mt19937_64 streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace walkcast

#endif  // WALKCAST_RNG_HPP
