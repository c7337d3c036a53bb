#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace rcs {

namespace detail {
// splitmix64 finalizer (Vigna). One invertible 64-bit mixing round.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic 64-bit generator built on the splitmix64 counter sequence.
// Bit-reproducible for a fixed seed on any platform; no global state.
//
// Streams: every consumer derives its own seed with derive_seed(master, {tags...})
// so that independent purposes (matrix, support, amplitudes, noise, ...) never
// share or shift each other's sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // tangents of derived variates stay finite.
  double uniform01() {
    const std::uint64_t bits = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (two uniforms per variate, no cached state).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double exponential() { return -std::log(uniform01()); }

 private:
  std::uint64_t state_;
};

// Hash-chains a master seed with a path of tags into an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix64(master ^ 0xA0761D6478BD642FULL);
  for (std::uint64_t tag : path) {
    h = detail::mix64(h ^ detail::mix64(tag + 0x9E3779B97F4A7C15ULL));
  }
  return h;
}

// Stream tags used across the toolkit. Fixed numeric values are part of the
// reproducibility contract: changing them changes every seeded experiment.
enum class Stream : std::uint64_t {
  Matrix = 1,
  Support = 2,
  Amplitude = 3,
  Noise = 4,
  PowerIteration = 5,
  ProxCheck = 6,
};

inline std::uint64_t stream_tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace rcs
