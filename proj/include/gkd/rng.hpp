#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace gkd {

// SplitMix64. Chosen for portability: the stream is a pure function of the
// 64-bit state, so every implementation language reproduces it exactly.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::pair<std::uint64_t, std::uint64_t> splitmix64(std::uint64_t state) {
  state += 0x9E3779B97F4A7C15ULL;
  return {state, splitmix64_mix(state)};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    auto [s, v] = splitmix64(state_);
    state_ = s;
    return v;
  }

  // uniform in [0,1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller; draws two uniforms per call, no caching (keeps the
  // consumption count per call fixed and documented).
  double gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Independent per-index substream, used for per-video generation.
inline std::uint64_t derive_stream_seed(std::uint64_t seed,
                                        std::uint64_t index) {
  return splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace gkd
