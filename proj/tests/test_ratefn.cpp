#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle_utils.hpp"
#include "zigzag/ratefn.hpp"

using namespace zigzag;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

DensityPair random_pair(oracle::TestRng& rng, int n, double max_amp = 0.6) {
  const oracle::SmoothDensity d = oracle::random_density(rng, max_amp);
  return DensityPair::from_function(n, d.rho, d.drho);
}
}  // namespace

TEST_CASE("quadrature: periodic trapezoid") {
  std::vector<double> v(64);
  for (int i = 0; i < 64; ++i) {
    const double s = std::sin(two_pi * (i + 0.5) / 64);
    v[i] = s * s;
  }
  CHECK(quadrature(v) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<double> c(17, 3.75);
  CHECK(quadrature(c) == doctest::Approx(3.75).epsilon(1e-15));

  std::vector<double> e(256);
  for (int i = 0; i < 256; ++i) e[i] = std::exp(-std::cos(two_pi * (i + 0.5) / 256));
  const double ref =
      oracle::reference_integral([](double x) { return std::exp(-std::cos(two_pi * x)); });
  CHECK(std::abs(quadrature(e) - ref) <= 1e-10);
  CHECK(std::abs(quadrature(e) - 1.2660658777520083) <= 1e-10);

  CHECK_THROWS_AS(quadrature(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("rate vanishes at the stationary measure") {
  for (const Potential& u : {Potential::zero(), Potential::cosine(1.0, 1),
                             Potential::cosine(0.5, 2)}) {
    for (double gamma : {0.1, 1.0}) {
      const SwitchingRate rate(u, gamma);
      const DensityPair d = DensityPair::stationary(u, 256);
      const RateReport r = rate_explicit(d, rate);
      CHECK(std::abs(r.value) <= 1e-8);
      CHECK(r.value >= -1e-10);
    }
  }
}

TEST_CASE("constant-density branch reproduces the closed form") {
  const SwitchingRate rate(Potential::zero(), 1.0);
  const DensityPair d = DensityPair::from_functions(
      64, [](double) { return 1.2; }, [](double) { return 0.0; },
      [](double) { return 0.8; }, [](double) { return 0.0; });
  const RateReport r = rate_explicit(d, rate);
  CHECK(r.branch == RateBranch::constant);
  const double closed = std::pow(std::sqrt(1.2) - std::sqrt(0.8), 2.0);
  CHECK(r.value == doctest::Approx(closed).epsilon(1e-14));
  CHECK(std::abs(r.value - 0.0404082) <= 1e-7);

  // general integrand evaluated at rho' = 0 agrees pointwise with the branch
  for (int i = 0; i < 64; ++i) {
    const double general = -std::sqrt(4.0 * 1.0 * 1.0 * 1.2 * 0.8) + 1.2 + 0.8;
    CHECK(std::abs(r.integrand[i] - general) <= 1e-12);
  }
}

TEST_CASE("derivative mismatch sends the rate to infinity") {
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  const DensityPair d = DensityPair::from_functions(
      128, [](double x) { return 1.0 + 0.2 * std::sin(two_pi * x); },
      [](double x) { return 0.2 * two_pi * std::cos(two_pi * x); },
      [](double x) { return 1.0 - 0.2 * std::sin(two_pi * x); },
      [](double x) { return -0.2 * two_pi * std::cos(two_pi * x); });
  const RateReport r = rate_explicit(d, rate);
  CHECK(r.is_infinite());
  CHECK(r.branch == RateBranch::infinite);
}

TEST_CASE("vanishing switching rate is a positivity error") {
  const SwitchingRate canonical(Potential::cosine(1.0, 1), 0.0);
  const DensityPair d = DensityPair::stationary(Potential::cosine(1.0, 1), 64);
  CHECK_THROWS_AS(rate_explicit(d, canonical), std::domain_error);
}

TEST_CASE("nonpositive density under the general branch is a domain error") {
  const SwitchingRate rate(Potential::zero(), 1.0);
  const DensityPair d = DensityPair::from_function(
      64, [](double x) { return 1.0 + 1.2 * std::sin(two_pi * x); },
      [](double x) { return 1.2 * two_pi * std::cos(two_pi * x); });
  CHECK_THROWS_AS(rate_explicit(d, rate), std::domain_error);
}

TEST_CASE("nonnegativity over random smooth densities") {
  oracle::TestRng rng(314);
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const RateReport r = rate_explicit(random_pair(rng, 128), rate);
    CHECK(r.value >= -1e-10);
  }
}

TEST_CASE("rate separates measures away from stationarity") {
  for (const Potential& u : {Potential::zero(), Potential::cosine(1.0, 1)}) {
    for (double gamma : {0.1, 1.0}) {
      const SwitchingRate rate(u, gamma);
      const int n = 256;
      const DensityPair pi = DensityPair::stationary(u, n);
      for (double phase : {0.0, 1.0, 2.5}) {
        const DensityPair d = DensityPair::from_function(
            n, [phase](double x) { return 1.0 + 0.3 * std::sin(two_pi * x + phase); },
            [phase](double x) { return 0.3 * two_pi * std::cos(two_pi * x + phase); });
        // total variation against the stationary pair over the 2n states:
        // (1/2) sum |rho_mu - rho_pi| dnu0 with dnu0 = dx/2 per velocity
        double tv = 0.0;
        for (int i = 0; i < n; ++i)
          tv += 0.25 * (std::abs(d.rho_plus[i] - pi.rho_plus[i]) +
                        std::abs(d.rho_minus[i] - pi.rho_minus[i])) /
                n;
        if (tv < 0.05) continue;
        CHECK(rate_explicit(d, rate).value >= 1e-3);
      }
    }
  }
}

TEST_CASE("optimal tilt closed forms") {
  // lambda+(x)=2, lambda-(x)=1 at x=0.75 via amplitude 1/(2 pi), gamma=1
  const SwitchingRate rate(Potential::cosine(1.0 / two_pi, 1), 1.0);
  const DensityPair uniform = DensityPair::from_function(
      2, [](double) { return 1.0; }, [](double) { return 0.0; });
  const std::vector<double> tilt = optimal_tilt(uniform, rate);
  CHECK(tilt[1] == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(0.5 * std::log(2.0) == doctest::Approx(0.346574).epsilon(1e-6));

  // rho' = 2, lambda+- = 1, rho = 1 at x = 0.25
  const SwitchingRate flat(Potential::zero(), 1.0);
  const DensityPair sloped = DensityPair::from_function(
      2, [](double x) { return 1.0 - std::cos(two_pi * x) / std::numbers::pi; },
      [](double x) { return 2.0 * std::sin(two_pi * x); });
  const std::vector<double> tilt2 = optimal_tilt(sloped, flat);
  CHECK(tilt2[0] == doctest::Approx(std::asinh(1.0)).epsilon(1e-12));
  CHECK(std::asinh(1.0) == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(std::asinh(1.0) == doctest::Approx(0.881374).epsilon(1e-6));

  // symmetric case: equal products give zero tilt
  const std::vector<double> tilt3 = optimal_tilt(uniform, flat);
  CHECK(tilt3[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("tilt objective: zero tilt, optimality, strict convexity") {
  oracle::TestRng rng(2718);
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityPair d = random_pair(rng, 128);
    CHECK(tilt_objective(d, rate, std::vector<double>(128, 0.0)) ==
          doctest::Approx(0.0).epsilon(1e-15));

    const double value = rate_explicit(d, rate).value;
    const std::vector<double> star = optimal_tilt(d, rate);
    CHECK(std::abs(-tilt_objective(d, rate, star) - value) <= 1e-10);

    for (double delta : {-0.01, 0.01}) {
      std::vector<double> shifted = star;
      for (double& e : shifted) e += delta;
      CHECK(tilt_objective(d, rate, shifted) > tilt_objective(d, rate, star));
    }

    // lower-bound sandwich for random tilts
    for (int k = 0; k < 5; ++k) {
      std::vector<double> tilt(128);
      for (double& e : tilt) e = rng.uniform(-1.0, 1.0);
      CHECK(-tilt_objective(d, rate, tilt) <= value + 1e-10);
    }
  }
}

TEST_CASE("W-form agrees with the explicit formula") {
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  const int n = 128;

  // stationary W gives zero
  const WForm stat = WForm::stationary(Potential::cosine(1.0, 1), n);
  CHECK(std::abs(rate_w_form(stat, rate).value) <= 1e-8);

  // uniform density: both routes agree
  const DensityPair uniform = DensityPair::from_function(
      n, [](double) { return 1.0; }, [](double) { return 0.0; });
  const WForm w = WForm::from_density(uniform);
  CHECK(std::abs(rate_w_form(w, rate).value - rate_explicit(uniform, rate).value) <= 1e-10);

  // algebraic cancellation at U = 0, gamma = 1
  const SwitchingRate flat(Potential::zero(), 1.0);
  const RateReport r = rate_w_form(w, flat);
  for (double cell : r.integrand) CHECK(std::abs(cell) <= 1e-14);

  // cross-check on random densities
  oracle::TestRng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityPair d = random_pair(rng, n);
    const WForm wd = WForm::from_density(d);
    CHECK(std::abs(rate_w_form(wd, rate).value - rate_explicit(d, rate).value) <= 1e-10);
  }
}

TEST_CASE("gamma derivative: closed-form cells and the zero locus") {
  // lambda+=2, lambda-=1 at cell 0.75 (and mirrored at 0.25), W = 0
  const SwitchingRate rate(Potential::cosine(1.0 / two_pi, 1), 1.0);
  const WForm w0 = WForm::from_function(2, [](double) { return 0.0; }, [](double) { return 0.0; });
  const GammaDerivativeReport g = gamma_derivative(w0, rate);
  const double frozen = (8.0 - 3.0 * std::sqrt(8.0)) / 4.0;
  CHECK(g.per_cell[0] == doctest::Approx(frozen).epsilon(1e-12));
  CHECK(g.per_cell[1] == doctest::Approx(frozen).epsilon(1e-12));
  CHECK(frozen == doctest::Approx(-0.121320).epsilon(1e-5));

  // W' = U' everywhere: derivative vanishes per cell
  const Potential u = Potential::cosine(1.0, 1);
  const SwitchingRate rate_u(u, 1.0);
  const WForm stat = WForm::stationary(u, 64);
  const GammaDerivativeReport gs = gamma_derivative(stat, rate_u);
  for (double cell : gs.per_cell) CHECK(std::abs(cell) <= 1e-12);

  // lambda+ = lambda- = gamma with W' = 0: 4 g^2 - 2g * 2g = 0
  const SwitchingRate pure(Potential::zero(), 0.7);
  const GammaDerivativeReport gz = gamma_derivative(w0, pure);
  for (double cell : gz.per_cell) CHECK(std::abs(cell) <= 1e-14);

  CHECK_THROWS_AS(gamma_derivative(w0, SwitchingRate(Potential::zero(), 0.0)),
                  std::domain_error);
}

TEST_CASE("gamma monotonicity and the finite-difference check") {
  const Potential u = Potential::cosine(1.0, 1);
  const int n = 128;
  const DensityPair d = DensityPair::from_function(
      n, [](double x) { return 1.0 + 0.4 * std::sin(two_pi * x); },
      [](double x) { return 0.4 * two_pi * std::cos(two_pi * x); });
  const WForm w = WForm::from_density(d);

  double prev = rate_w_form(w, SwitchingRate(u, 0.25)).value;
  for (double gamma : {0.5, 1.0, 2.0, 4.0}) {
    const double cur = rate_w_form(w, SwitchingRate(u, gamma)).value;
    CHECK(prev - cur > 1e-10);
    prev = cur;
  }

  const double eps = 1e-4;
  for (double gamma : {0.5, 1.0, 2.0}) {
    const double fd = (rate_w_form(w, SwitchingRate(u, gamma + eps)).value -
                       rate_w_form(w, SwitchingRate(u, gamma)).value) /
                      eps;
    const double exact = gamma_derivative(w, SwitchingRate(u, gamma)).integral;
    CHECK(std::abs(fd - exact) <= 0.01 * std::abs(exact));
    CHECK(exact < 0.0);
  }
}

TEST_CASE("gamma-zero limit: stationary form, conventions, continuation") {
  const Potential u = Potential::cosine(1.0, 1);
  const int n = 256;

  // W = U + log Z: the integrand cancels pointwise
  const GammaZeroReport stat = rate_gamma_zero(WForm::stationary(u, n), u);
  CHECK(std::abs(stat.value) <= 1e-12);

  // W' = 0 cells contribute |U'| e^-W: uniform W gives the quadrature of |U'|
  // (the integral is 4; the grid sum of the kinked |sin| carries O(1/n^2))
  const WForm flat = WForm::from_function(n, [](double) { return 0.0; }, [](double) { return 0.0; });
  const GammaZeroReport uniform = rate_gamma_zero(flat, u);
  std::vector<double> abs_du(n);
  for (int i = 0; i < n; ++i) abs_du[i] = std::abs(u.deriv((i + 0.5) / n));
  CHECK(uniform.value == doctest::Approx(quadrature(abs_du)).epsilon(1e-13));
  CHECK(std::abs(uniform.value - 4.0) <= 1e-3);

  // sign mismatch anywhere: +inf (W' = -U')
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(u.value((i + 0.5) / n));
  z /= n;
  Potential u_copy = u;
  const WForm mismatched = WForm::from_function(
      n, [u_copy, z](double x) { return -u_copy.value(x) + std::log(z); },
      [u_copy](double x) { return -u_copy.deriv(x); });
  CHECK(rate_gamma_zero(mismatched, u).is_infinite());

  // W' = 2U' sign-matched: small-gamma continuation within 1e-3
  double z2 = 0.0;
  for (int i = 0; i < n; ++i) z2 += std::exp(-2.0 * u.value((i + 0.5) / n));
  z2 /= n;
  const WForm doubled = WForm::from_function(
      n, [u_copy, z2](double x) { return 2.0 * u_copy.value(x) + std::log(z2); },
      [u_copy](double x) { return 2.0 * u_copy.deriv(x); });
  const double limit = rate_gamma_zero(doubled, u).value;
  const double continued = rate_w_form(doubled, SwitchingRate(u, 1e-6)).value;
  CHECK(std::abs(limit - continued) <= 1e-3);

  // all-flagged grid is a precondition error
  const WForm any = WForm::from_function(8, [](double) { return 0.0; }, [](double) { return 0.0; });
  CHECK_THROWS_AS(rate_gamma_zero(any, Potential::zero()), std::invalid_argument);
}

TEST_CASE("gamma-zero limit flags exact zeros of U'") {
  // phase engineered so U' is exactly zero at the cell center 0.1875 (N=8)
  const double phase = -(two_pi * 0.1875);
  const Potential u = Potential::cosine(1.0, 1, phase);
  REQUIRE(u.deriv(0.1875) == 0.0);
  double z2 = 0.0;
  for (int i = 0; i < 8; ++i) z2 += std::exp(-2.0 * u.value((i + 0.5) / 8));
  z2 /= 8;
  Potential u_copy = u;
  const WForm doubled = WForm::from_function(
      8, [u_copy, z2](double x) { return 2.0 * u_copy.value(x) + std::log(z2); },
      [u_copy](double x) { return 2.0 * u_copy.deriv(x); });
  const GammaZeroReport r = rate_gamma_zero(doubled, u);
  CHECK_FALSE(r.is_infinite());
  REQUIRE(!r.flagged_cells.empty());
  CHECK(std::find(r.flagged_cells.begin(), r.flagged_cells.end(), 1) != r.flagged_cells.end());
  for (int cell : r.flagged_cells) CHECK(r.integrand[cell] == 0.0);
}

TEST_CASE("velocity asymmetry scan: minimum at c = 0") {
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  const int n = 128;
  const DensityPair base = DensityPair::from_function(
      n, [](double x) { return 1.0 + 0.3 * std::cos(two_pi * x); },
      [](double x) { return -0.3 * two_pi * std::sin(two_pi * x); });
  std::vector<double> cs;
  for (int i = 0; i <= 20; ++i) cs.push_back(-0.2 + 0.02 * i);
  const AsymmetryScan scan = scan_velocity_asymmetry(base, rate, cs);
  CHECK(scan.argmin_c == doctest::Approx(0.0).epsilon(1e-15));

  // symmetric table: lambda+(x) = lambda-(1-x) for the phase-0 cosine and the
  // cosine density is symmetric under x -> 1-x
  for (int i = 0; i <= 20; ++i)
    CHECK(scan.values[i] == doctest::Approx(scan.values[20 - i]).epsilon(1e-11));

  // c = 0 row equals the W-form value of the same density
  const double w_value = rate_w_form(WForm::from_density(base), rate).value;
  CHECK(std::abs(scan.values[10] - w_value) <= 1e-10);

  CHECK_THROWS_AS(base.velocity_offset(0.8), std::domain_error);
}

TEST_CASE("convexity in the measure") {
  oracle::TestRng rng(1618);
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  const int n = 128;
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::SmoothDensity a = oracle::random_density(rng);
    const oracle::SmoothDensity b = oracle::random_density(rng);
    const double t = rng.uniform(0.1, 0.9);
    const DensityPair da = DensityPair::from_function(n, a.rho, a.drho);
    const DensityPair db = DensityPair::from_function(n, b.rho, b.drho);
    const DensityPair mix = DensityPair::from_function(
        n, [&a, &b, t](double x) { return t * a.rho(x) + (1.0 - t) * b.rho(x); },
        [&a, &b, t](double x) { return t * a.drho(x) + (1.0 - t) * b.drho(x); });
    const double lhs = rate_explicit(mix, rate).value;
    const double rhs =
        t * rate_explicit(da, rate).value + (1.0 - t) * rate_explicit(db, rate).value;
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("mesh convergence of the explicit formula") {
  // density with a slow Fourier tail: 1/(a + cos), normalized per grid
  const double a = 1.013;
  const SwitchingRate rate(Potential::cosine(1.0, 1), 1.0);
  std::vector<double> values;
  for (int n : {64, 128, 256, 512}) {
    double mass = 0.0;
    for (int i = 0; i < n; ++i) mass += 1.0 / (a + std::cos(two_pi * (i + 0.5) / n));
    mass /= n;
    const DensityPair d = DensityPair::from_function(
        n, [a, mass](double x) { return 1.0 / (a + std::cos(two_pi * x)) / mass; },
        [a, mass](double x) {
          const double den = a + std::cos(two_pi * x);
          return two_pi * std::sin(two_pi * x) / (den * den) / mass;
        });
    values.push_back(rate_explicit(d, rate).value);
  }
  const double d01 = std::abs(values[0] - values[1]);
  const double d12 = std::abs(values[1] - values[2]);
  const double d23 = std::abs(values[2] - values[3]);
  CHECK(d01 > d12);
  CHECK(d12 > d23);
}

TEST_CASE("from_values computes spectral derivatives") {
  const int n = 128;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = 1.0 + 0.4 * std::sin(two_pi * (i + 0.5) / n);
  const DensityPair d = DensityPair::from_values(vals, vals);
  CHECK_FALSE(d.analytic);
  for (int i = 0; i < n; ++i) {
    const double exact = 0.4 * two_pi * std::cos(two_pi * (i + 0.5) / n);
    CHECK(std::abs(d.drho_plus[i] - exact) <= 1e-9);
  }
}

TEST_CASE("normalization violations are rejected") {
  CHECK_THROWS_AS(DensityPair::from_function(
                      64, [](double) { return 1.5; }, [](double) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(WForm::from_function(64, [](double) { return 0.5; }, [](double) { return 0.0; }),
                  std::invalid_argument);
}
