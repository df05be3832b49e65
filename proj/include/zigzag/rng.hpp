#ifndef ZIGZAG_RNG_HPP
#define ZIGZAG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace zigzag {

// Counter-based splittable generator (SplitMix64). A stream is keyed by
// (seed, stream id); draws depend only on the key and the draw counter, so
// ensembles are reproducible independently of execution order or thread
// count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed) ^ mix(golden * (stream + 1)))) {}

  std::uint64_t next_u64() {
    state_ += golden;
    return mix(state_);
  }

  // Uniform draw strictly inside (0,1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// -log(u)/rate: exact inversion of the exponential law.
inline double exponential_from_uniform(double u, double rate) {
  if (rate <= 0.0) throw std::domain_error("exponential rate must be positive");
  return -std::log(u) / rate;
}

}  // namespace zigzag

#endif
