#pragma once

#include <cstdint>
#include <cmath>

namespace d2dlf {

// Counter-based pseudo-random stream (SplitMix64 sequence). Streams are
// derived from a master seed by hashing the stream id, so each parallel
// worker owns an independent stream and draws are reproducible regardless
// of worker count.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(mix(mix(master_seed + 0x9e3779b97f4a7c15ull) ^
                         mix(stream_id + 0xbf58476d1ce4e5b9ull)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  // Box-Muller, no spare caching so the stream stays a pure counter
  double normal(double mu = 0.0, double sigma = 1.0) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace d2dlf
