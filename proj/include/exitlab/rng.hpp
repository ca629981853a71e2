#pragma once

#include <cstdint>

namespace exitlab {

// SplitMix64; per-path streams are derived from (seed, counter) so parallel
// path execution is deterministic regardless of scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : s_(state) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t counter) {
    // the avalanche output becomes the state, so nearby counters start from
    // well-separated points of the sequence instead of lag-shifted copies
    SplitMix64 mix(seed + 0x9E3779B97F4A7C15ull * (counter + 1));
    return SplitMix64(mix.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in (0,1)
  double uniform() {
    return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // standard normal pair (Box-Muller)
  void normal_pair(double& z0, double& z1);

 private:
  std::uint64_t s_;
};

}  // namespace exitlab
