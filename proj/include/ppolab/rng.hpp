#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace ppolab {

// Counter-based splittable RNG.
//
// The generator is SplitMix64: the state advances by the golden-ratio
// increment 0x9E3779B97F4A7C15 and each output is the finalizer
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
// applied to the advanced state. Seeds written into config files are
// portable: any implementation of this algorithm reproduces the streams.
//
// fork(key) derives an independent child stream without consuming draws
// from the parent: child_state = mix(mix(state ^ FORK_TAG) + key). For a
// fixed parent the map key -> child_state is injective, so sibling streams
// never share a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0,1) with 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0,n) by the multiply-shift map floor(u64 * n / 2^64).
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller. Consumes two uniforms and keeps only the
  // cosine branch so the draw count per sample is fixed.
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates with index draws from below(); permutes in place.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  Rng fork(std::uint64_t key) const {
    return Rng(mix(mix(state_ ^ kForkTag) + key));
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  static constexpr std::uint64_t kForkTag = 0xA5B35705987C1CD5ULL;
  std::uint64_t state_;
};

}  // namespace ppolab
