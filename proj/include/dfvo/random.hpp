#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dfvo {

// splitmix64; used to derive independent stream seeds from the single
// configured rng_seed so every consumer stays deterministic.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic RNG wrapper. Draws are hand-rolled on the raw mt19937_64
// stream (no std::*_distribution) so sequences are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). Modulo bias is irrelevant at the n used here.
  uint64_t bounded(uint64_t n) { return gen_() % n; }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller standard normal.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // k distinct indices from [0, n), by partial Fisher-Yates on a scratch
  // buffer the caller keeps alive between calls.
  void sample_distinct(size_t n, size_t k, std::vector<int>& scratch, std::vector<int>& out) {
    if (scratch.size() != n) {
      scratch.resize(n);
      for (size_t i = 0; i < n; ++i) scratch[i] = static_cast<int>(i);
    }
    out.clear();
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(bounded(n - i));
      std::swap(scratch[i], scratch[j]);
      out.push_back(scratch[i]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dfvo
