#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle_utils.hpp"
#include "zigzag/empirical.hpp"

using namespace zigzag;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

Skeleton drift_only(double x0, int v0, double t_final) {
  Skeleton sk;
  sk.initial = {x0, v0};
  sk.t_final = t_final;
  return sk;
}
}  // namespace

TEST_CASE("single segment splits exactly over cells") {
  const Skeleton sk = drift_only(0.0, +1, 0.5);
  const EmpiricalMeasure m = accumulate(sk, 5);
  CHECK(m.occupancy(0, +1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(m.occupancy(1, +1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(m.occupancy(2, +1) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.occupancy(3, +1) == 0.0);
  CHECK(m.occupancy(4, +1) == 0.0);
  for (int i = 0; i < 5; ++i) CHECK(m.occupancy(i, -1) == 0.0);
}

TEST_CASE("full loop spreads uniformly") {
  const Skeleton sk = drift_only(0.0, +1, 1.0);
  const EmpiricalMeasure m = accumulate(sk, 4);
  for (int i = 0; i < 4; ++i) CHECK(m.occupancy(i, +1) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("occupancy conserves total time on random skeletons") {
  oracle::TestRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Skeleton sk;
    sk.initial = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0) < 0.5 ? -1 : +1};
    double t = 0.0;
    double x = sk.initial.x;
    int v = sk.initial.v;
    const int n_events = rng.uniform_int(0, 30);
    for (int e = 0; e < n_events; ++e) {
      const double dt = rng.uniform(0.01, 2.0);
      t += dt;
      x = wrap_torus(x + v * dt);
      v = -v;
      sk.events.push_back({t, x, v});
    }
    sk.t_final = t + rng.uniform(0.01, 2.0);
    const int cells = rng.uniform_int(2, 17);
    const EmpiricalMeasure m = accumulate(sk, cells);
    double total = 0.0;
    for (int i = 0; i < cells; ++i) total += m.occupancy(i, +1) + m.occupancy(i, -1);
    CHECK(total == doctest::Approx(sk.t_final).epsilon(1e-12));

    // normalized measure lies in the probability simplex
    double mass = 0.0;
    for (int i = 0; i < cells; ++i) {
      CHECK(m.probability(i, +1) >= 0.0);
      CHECK(m.probability(i, -1) >= 0.0);
      mass += m.probability(i, +1) + m.probability(i, -1);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("accumulation is additive over concatenation") {
  oracle::TestRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    // Build a two-segment skeleton and split it at the event.
    const double x0 = rng.uniform(0.0, 1.0);
    const double t1 = rng.uniform(0.2, 1.5);
    const double t2 = t1 + rng.uniform(0.2, 1.5);
    Skeleton whole;
    whole.initial = {x0, +1};
    const double x1 = wrap_torus(x0 + t1);
    whole.events.push_back({t1, x1, -1});
    whole.t_final = t2;

    Skeleton first = drift_only(x0, +1, t1);
    Skeleton second = drift_only(x1, -1, t2 - t1);

    EmpiricalMeasure sum(8);
    sum.add(first);
    sum.add(second);
    const EmpiricalMeasure direct = accumulate(whole, 8);
    for (int i = 0; i < 8; ++i) {
      CHECK(sum.occupancy(i, +1) == doctest::Approx(direct.occupancy(i, +1)).epsilon(1e-12));
      CHECK(sum.occupancy(i, -1) == doctest::Approx(direct.occupancy(i, -1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("line-domain skeletons are rejected") {
  Skeleton sk = drift_only(0.0, +1, 1.0);
  sk.domain = DomainKind::line;
  CHECK_THROWS_AS(accumulate(sk, 8), std::invalid_argument);
}

TEST_CASE("time averages: constant, velocity symmetry, periodic integral") {
  const Observable constant{[](double, int) { return 3.25; }, false};
  const Skeleton sk = drift_only(0.1, +1, 2.0);
  CHECK(time_average(sk, constant) == doctest::Approx(3.25).epsilon(1e-15));

  // equal time at +1 and -1
  Skeleton flip;
  flip.initial = {0.0, +1};
  flip.events.push_back({1.0, 0.0, -1});
  flip.t_final = 2.0;
  const Observable velocity{[](double, int v) { return static_cast<double>(v); }, true};
  CHECK(time_average(flip, velocity) == doctest::Approx(0.0).epsilon(1e-14));

  const Observable sine{[](double x, int) { return std::sin(two_pi * x); }, false};
  const Skeleton loop = drift_only(0.3, +1, 1.0);
  CHECK(time_average(loop, sine) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cell-averaged observable agrees within the discretization bound") {
  oracle::TestRng rng(5);
  const int cells = 64;
  for (int trial = 0; trial < 10; ++trial) {
    Skeleton sk;
    sk.initial = {rng.uniform(0.0, 1.0), +1};
    double t = 0.0;
    double x = sk.initial.x;
    int v = +1;
    for (int e = 0; e < 10; ++e) {
      const double dt = rng.uniform(0.05, 0.8);
      t += dt;
      x = wrap_torus(x + v * dt);
      v = -v;
      sk.events.push_back({t, x, v});
    }
    sk.t_final = t + 0.3;

    const Observable obs{[](double y, int) { return std::cos(two_pi * y); }, false};
    const double exact = time_average(sk, obs);
    const EmpiricalMeasure m = accumulate(sk, cells);
    double from_cells = 0.0;
    for (int i = 0; i < cells; ++i) {
      const double center = (i + 0.5) / cells;
      from_cells += obs(center, +1) * (m.probability(i, +1) + m.probability(i, -1));
    }
    const double bound = two_pi / cells;  // sup|f'| * dx
    CHECK(std::abs(from_cells - exact) <= bound);
  }
}

TEST_CASE("total variation distance examples") {
  // identical distributions
  Skeleton half = drift_only(0.0, +1, 1.0);
  const EmpiricalMeasure m = accumulate(half, 2);
  CHECK(tv_distance(m, {1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));

  // disjoint supports: all mass in cell 0 vs density concentrated on cell 1
  const EmpiricalMeasure first_cell = accumulate(drift_only(0.1, +1, 0.25), 2);
  CHECK(first_cell.occupancy(0, +1) == doctest::Approx(0.25));
  CHECK(tv_distance(first_cell, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));

  // uniform marginal vs (0.75, 0.25) density
  CHECK(tv_distance(m, {0.75, 0.25}) == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(tv_distance(m, {1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("observable boundedness scan") {
  const Observable fine{[](double x, int) { return std::cos(two_pi * x); }, false};
  CHECK(observable_bounded(fine));
  const Observable blowup{[](double x, int) { return 1.0 / (x - 0.5); }, false};
  CHECK(observable_bounded(blowup));  // finite at every scan point
  const Observable infinite{[](double, int) { return std::numeric_limits<double>::infinity(); },
                            false};
  CHECK_FALSE(observable_bounded(infinite));
}

TEST_CASE("merge combines occupancy and time") {
  EmpiricalMeasure a = accumulate(drift_only(0.0, +1, 0.5), 4);
  const EmpiricalMeasure b = accumulate(drift_only(0.5, -1, 0.75), 4);
  a.merge(b);
  CHECK(a.t_total() == doctest::Approx(1.25).epsilon(1e-15));
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += a.occupancy(i, +1) + a.occupancy(i, -1);
  CHECK(total == doctest::Approx(1.25).epsilon(1e-13));
}
