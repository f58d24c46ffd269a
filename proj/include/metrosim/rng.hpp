#pragma once

#include <cmath>
#include <cstdint>

namespace metrosim {

// Deterministic splitmix64 stream. Experiments derive one stream per random
// quantity (arrivals, holds, endpoints, ...) from a single user seed, so
// adding a stream never perturbs the draws of another.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Exponential with the given mean, strictly positive.
  double exponential(double mean) {
    return -mean * std::log1p(-uniform01());
  }

  // Uniform integer in [0, n); n must be > 0.
  std::size_t pick(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace metrosim
