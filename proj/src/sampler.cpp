#include "zigzag/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zigzag/errors.hpp"

namespace zigzag {

namespace {

double default_horizon(const SwitchingRate& rate, double x, int v, DomainKind domain) {
  if (domain == DomainKind::torus) return 0.1;
  // Line: scan the unit segment ahead for curvature and shrink accordingly.
  const Potential& u = rate.potential();
  double max_curv = 0.0;
  for (int j = 0; j <= 16; ++j)
    max_curv = std::max(max_curv, std::abs(u.second_deriv(x + v * j / 16.0)));
  return std::min(1.0, 1.0 / (1.0 + max_curv));
}

}  // namespace

Skeleton simulate(const SwitchingRate& rate, State s0, const SimConfig& cfg,
                  std::uint64_t stream) {
  if (cfg.t_max <= 0.0) throw ConfigError("simulate: t_max must be positive");
  if (s0.v != +1 && s0.v != -1) throw ConfigError("simulate: velocity must be +1 or -1");

  Skeleton sk;
  sk.domain = cfg.domain;
  sk.seed = cfg.seed;
  sk.stream = stream;
  s0.x = wrap(s0.x, cfg.domain);
  sk.initial = s0;
  sk.t_final = cfg.t_max;

  RngStream rng(cfg.seed, stream);
  double x = s0.x;
  int v = s0.v;
  double t = 0.0;

  while (t < cfg.t_max) {
    const double h_base = cfg.thinning_horizon > 0.0 ? cfg.thinning_horizon
                                                     : default_horizon(rate, x, v, cfg.domain);
    const double window = std::min(h_base, cfg.t_max - t);
    if (window <= cfg.t_max * 1e-16) break;  // below representable progress
    const double envelope = local_rate_bound(rate, x, v, window);

    if (envelope <= 0.0) {
      x = wrap(x + v * window, cfg.domain);
      t += window;
      continue;
    }

    double elapsed = 0.0;
    while (true) {
      const double candidate = exponential_from_uniform(rng.next_unit(), envelope);
      if (elapsed + candidate >= window) {
        // Candidate falls beyond the window: drift to its end and re-bound.
        x = wrap(x + v * (window - elapsed), cfg.domain);
        t += window - elapsed;
        break;
      }
      elapsed += candidate;
      x = wrap(x + v * candidate, cfg.domain);
      t += candidate;
      ++sk.proposals;
      const double lam = rate.lambda(x, v);
      if (lam > envelope * (1.0 + 1e-9))
        throw NumericalError("simulate: switching rate exceeds thinning envelope");
      if (rng.next_unit() * envelope < lam) {
        ++sk.acceptances;
        v = -v;
        sk.events.push_back({t, x, v});
        break;  // velocity changed, envelope stale
      }
    }
  }
  return sk;
}

double next_event_constant_rate(double rate, RngStream& rng) {
  return exponential_from_uniform(rng.next_unit(), rate);
}

State position_at(const Skeleton& sk, double t) {
  if (t < 0.0 || t > sk.t_final) throw std::out_of_range("position_at: time outside [0, t_final]");
  // Last event with event time <= t, or the initial state.
  double t0 = 0.0;
  double x0 = sk.initial.x;
  int v0 = sk.initial.v;
  auto it = std::upper_bound(sk.events.begin(), sk.events.end(), t,
                             [](double value, const SkeletonEvent& e) { return value < e.t; });
  if (it != sk.events.begin()) {
    const SkeletonEvent& e = *(it - 1);
    t0 = e.t;
    x0 = e.x;
    v0 = e.v;
  }
  return State{wrap(x0 + v0 * (t - t0), sk.domain), v0};
}

}  // namespace zigzag
