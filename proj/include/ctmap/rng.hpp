// Seedable random number generation with a portable, documented engine.
//
// All stochastic choices in the library flow through Rng, which wraps
// std::mt19937_64. That engine's output sequence is fixed by the C++
// standard, so equal seeds give equal streams on every platform. The
// distributions below are implemented here (rejection sampling for
// bounded integers, explicit 53-bit mantissa fill for doubles) because
// the standard library's distribution objects are not portable.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ctmap {

// splitmix64 finalizer; used to derive independent seeds from a base seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-task seed from a base seed and two tag integers.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  return mix64(mix64(mix64(base) ^ a) ^ b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform integer in [0, bound); unbiased via rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Fisher-Yates shuffle driven by below(), so results are portable.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ctmap
