#pragma once

#include <cmath>
#include <cstdint>

namespace binpose {

// All randomness in the library flows through SplitMix64. The generator and
// the stream-derivation rule below are part of the reproducibility contract:
// outputs depend only on (inputs, config, seed), never on thread scheduling.
//
// Reference sequence: state advances by the 64-bit golden ratio constant and
// each output is the finalizer mix of the advanced state (Steele, Lea &
// Flood, "Fast splittable pseudorandom number generators").
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent child seed from (seed, index). Used to give every
// scene, sample, pixel, ... its own stream so parallel execution order can
// never change the result.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ull + index);
  std::uint64_t a = splitmix64_next(s);
  std::uint64_t b = splitmix64_next(s);
  return a ^ (b << 1);
}

// Stream tags keep the per-purpose streams of one seed disjoint.
enum StreamTag : std::uint64_t {
  kSceneStream = 0x5CE17E5,
  kSampleStream = 0x5A3B1E5,
  kRenderStream = 0x4E7DE12,
  kDetectStream = 0xDE7EC7,
  kAugmentStream = 0xA063E17,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                 std::uint64_t index) {
  return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(tag)), index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Inclusive on both ends.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(
                    static_cast<std::uint64_t>(next_double() * static_cast<double>(span)));
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Standard normal via Box-Muller; two uniforms per pair, second value
  // cached. Fully specified so streams are identical on every platform.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace binpose
