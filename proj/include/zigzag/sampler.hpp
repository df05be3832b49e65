#ifndef ZIGZAG_SAMPLER_HPP
#define ZIGZAG_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "zigzag/domain.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/rng.hpp"

namespace zigzag {

struct State {
  double x = 0.0;
  int v = +1;
};

// One velocity flip: time, position at the flip, velocity after it.
struct SkeletonEvent {
  double t;
  double x;
  int v;
};

// Sparse record of one trajectory. Between events the path is linear with
// unit speed, so every downstream functional is exact on segments.
struct Skeleton {
  State initial;
  std::vector<SkeletonEvent> events;
  double t_final = 0.0;
  DomainKind domain = DomainKind::torus;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t proposals = 0;
  std::uint64_t acceptances = 0;
};

struct SimConfig {
  double t_max = 0.0;
  std::uint64_t seed = 0;
  // Thinning lookahead. 0 selects the default: 0.1 on the torus,
  // min(1, 1/(1 + sup_segment |U''|)) on the line.
  double thinning_horizon = 0.0;
  DomainKind domain = DomainKind::torus;
};

// Exact zig-zag simulation by Poisson thinning: candidate times at the local
// envelope rate, accepted with probability lambda/envelope; velocity flips on
// acceptance. The envelope is recomputed after each flip and after each
// elapsed lookahead window.
Skeleton simulate(const SwitchingRate& rate, State s0, const SimConfig& cfg,
                  std::uint64_t stream);

// Exact inversion for a constant rate; the oracle the thinning sampler is
// validated against.
double next_event_constant_rate(double rate, RngStream& rng);

// Deterministic interpolation of the skeleton at time t in [0, t_final].
State position_at(const Skeleton& sk, double t);

}  // namespace zigzag

#endif
