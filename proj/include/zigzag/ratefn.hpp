#ifndef ZIGZAG_RATEFN_HPP
#define ZIGZAG_RATEFN_HPP

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "zigzag/potential.hpp"

namespace zigzag {

using ScalarFn = std::function<double(double)>;

// Candidate measure mu = rho(x,v) nu0(dx,dv) on the torus grid, stored as
// densities and their derivatives at the n cell centers. Normalization is
// against nu0 = Leb x Unif_{+-1}: (dx/2) sum(rho+ + rho-) = 1.
struct DensityPair {
  int n_cells = 0;
  std::vector<double> rho_plus, rho_minus;
  std::vector<double> drho_plus, drho_minus;
  bool analytic = false;  // derivatives from closures rather than spectral fit

  // rho+ = rho- = rho with analytic derivative.
  static DensityPair from_function(int n_cells, const ScalarFn& rho, const ScalarFn& drho);
  static DensityPair from_functions(int n_cells, const ScalarFn& rho_p, const ScalarFn& drho_p,
                                    const ScalarFn& rho_m, const ScalarFn& drho_m);
  // Tabulated values; derivatives by spectral differentiation.
  static DensityPair from_values(std::vector<double> rho_p, std::vector<double> rho_m);
  // The stationary pair rho+- = exp(-U)/Z.
  static DensityPair stationary(const Potential& potential, int n_cells);

  // rho_c(x,+1) = rho(x)+c, rho_c(x,-1) = rho(x)-c. Requires rho+ == rho-.
  DensityPair velocity_offset(double c) const;

  double min_rho() const;
};

// Representation rho = exp(-W) for a common density; int exp(-W) dx = 1.
struct WForm {
  int n_cells = 0;
  std::vector<double> w, dw;

  static WForm from_function(int n_cells, const ScalarFn& w, const ScalarFn& dw);
  // W = -log rho from a common-density pair.
  static WForm from_density(const DensityPair& d);
  // The stationary form W = U + log Z.
  static WForm stationary(const Potential& potential, int n_cells);
};

enum class RateBranch { general, constant, infinite, w_form, gamma_zero };

std::string to_string(RateBranch b);

// Rate-function evaluation: value (possibly +inf), the branch taken, and the
// per-cell integrand for inspection/export.
struct RateReport {
  double value = 0.0;
  RateBranch branch = RateBranch::general;
  std::vector<double> integrand;
  int n_cells = 0;

  bool is_infinite() const { return std::isinf(value); }
};

// Periodic trapezoid rule on the uniform grid: dx * sum(values).
double quadrature(std::span<const double> values);

// The explicit rate function on the torus.
//   - derivative mismatch sup|drho+ - drho-| beyond tolerance: value = +inf;
//   - flat pair: int (sqrt(lambda+ rho+) - sqrt(lambda- rho-))^2 dx;
//   - otherwise the general integrand
//       1/2 rho' log(l+ r+ / l- r-) + rho' arcsinh(rho'/(2 sqrt(l+ l- r+ r-)))
//       - sqrt(4 l+ l- r+ r- + rho'^2) + l+ r+ + l- r-.
// Requires lambda+ lambda- > 0 on the grid.
RateReport rate_explicit(const DensityPair& d, const SwitchingRate& rate);

// Pointwise minimizer of the tilt representation:
// eta* = 1/2 log(l+ r+ / l- r-) + arcsinh(rho'/(2 sqrt(l+ l- r+ r-))).
std::vector<double> optimal_tilt(const DensityPair& d, const SwitchingRate& rate);

// J(eta) = int { -rho' eta + l+ r+ (e^-eta - 1) + l- r- (e^eta - 1) } dx.
// -J(eta) is a lower bound on the rate function for every eta, with equality
// at the optimal tilt.
double tilt_objective(const DensityPair& d, const SwitchingRate& rate,
                      std::span<const double> tilt);

// Rate function in W-form; agrees with rate_explicit at rho = exp(-W).
RateReport rate_w_form(const WForm& w, const SwitchingRate& rate);

// d/dgamma of the W-form integrand, per cell plus its quadrature. Nonpositive
// everywhere; zero only where W' = U'.
struct GammaDerivativeReport {
  std::vector<double> per_cell;
  double integral = 0.0;
};

GammaDerivativeReport gamma_derivative(const WForm& w, const SwitchingRate& rate);

// The formal gamma->0 limit: int { |W'| (log(W'/U') - 1) + |U'| } e^-W dx when
// sign(W') matches sign(U') off the flagged {U'=0} cells, +inf on a strict
// sign mismatch. Cells with W'=0 contribute |U'| e^-W (the continuity limit).
struct GammaZeroReport : RateReport {
  std::vector<int> flagged_cells;  // |U'| at rounding level
};

GammaZeroReport rate_gamma_zero(const WForm& w, const Potential& potential);

// I(mu_c) over a grid of velocity offsets c; Prop-style scan whose argmin
// should sit at c = 0.
struct AsymmetryScan {
  std::vector<double> c_values;
  std::vector<double> values;
  double argmin_c = 0.0;
};

AsymmetryScan scan_velocity_asymmetry(const DensityPair& common, const SwitchingRate& rate,
                                      std::span<const double> c_values);

constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

}  // namespace zigzag

#endif
