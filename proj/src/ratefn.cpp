#include "zigzag/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zigzag/fourier.hpp"

namespace zigzag {

namespace {

double cell_center(int i, int n) { return (i + 0.5) / n; }

void check_normalization(double mass, const char* what) {
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(what) + ": normalization violated");
}

std::vector<double> lambdas_on_grid(const SwitchingRate& rate, int n, int v) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = rate.lambda(cell_center(i, n), v);
  return out;
}

}  // namespace

double quadrature(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("quadrature: empty grid");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

DensityPair DensityPair::from_functions(int n_cells, const ScalarFn& rho_p,
                                        const ScalarFn& drho_p, const ScalarFn& rho_m,
                                        const ScalarFn& drho_m) {
  if (n_cells < 2) throw std::invalid_argument("DensityPair: need at least 2 cells");
  DensityPair d;
  d.n_cells = n_cells;
  d.analytic = true;
  d.rho_plus.resize(n_cells);
  d.rho_minus.resize(n_cells);
  d.drho_plus.resize(n_cells);
  d.drho_minus.resize(n_cells);
  double mass = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    const double x = cell_center(i, n_cells);
    d.rho_plus[i] = rho_p(x);
    d.rho_minus[i] = rho_m(x);
    d.drho_plus[i] = drho_p(x);
    d.drho_minus[i] = drho_m(x);
    mass += 0.5 * (d.rho_plus[i] + d.rho_minus[i]);
  }
  check_normalization(mass / n_cells, "DensityPair");
  return d;
}

DensityPair DensityPair::from_function(int n_cells, const ScalarFn& rho, const ScalarFn& drho) {
  return from_functions(n_cells, rho, drho, rho, drho);
}

DensityPair DensityPair::from_values(std::vector<double> rho_p, std::vector<double> rho_m) {
  if (rho_p.size() != rho_m.size() || rho_p.size() < 2)
    throw std::invalid_argument("DensityPair: value vectors must match and hold >= 2 cells");
  DensityPair d;
  d.n_cells = static_cast<int>(rho_p.size());
  d.analytic = false;
  d.drho_plus = spectral_derivative(rho_p);
  d.drho_minus = spectral_derivative(rho_m);
  d.rho_plus = std::move(rho_p);
  d.rho_minus = std::move(rho_m);
  double mass = 0.0;
  for (int i = 0; i < d.n_cells; ++i) mass += 0.5 * (d.rho_plus[i] + d.rho_minus[i]);
  check_normalization(mass / d.n_cells, "DensityPair");
  return d;
}

DensityPair DensityPair::stationary(const Potential& potential, int n_cells) {
  std::vector<double> density = stationary_density(potential, n_cells);
  DensityPair d;
  d.n_cells = n_cells;
  d.analytic = true;
  d.rho_plus = density;
  d.rho_minus = density;
  d.drho_plus.resize(n_cells);
  for (int i = 0; i < n_cells; ++i)
    d.drho_plus[i] = -potential.deriv(cell_center(i, n_cells)) * density[i];
  d.drho_minus = d.drho_plus;
  return d;
}

DensityPair DensityPair::velocity_offset(double c) const {
  if (rho_plus != rho_minus)
    throw std::invalid_argument("velocity_offset: base pair must have a common density");
  if (std::abs(c) >= min_rho())
    throw std::domain_error("velocity_offset: |c| must stay below min rho for positivity");
  DensityPair d = *this;
  for (int i = 0; i < n_cells; ++i) {
    d.rho_plus[i] += c;
    d.rho_minus[i] -= c;
  }
  return d;
}

double DensityPair::min_rho() const {
  double m = rho_plus.empty() ? 0.0 : rho_plus[0];
  for (double r : rho_plus) m = std::min(m, r);
  for (double r : rho_minus) m = std::min(m, r);
  return m;
}

WForm WForm::from_function(int n_cells, const ScalarFn& w, const ScalarFn& dw) {
  if (n_cells < 2) throw std::invalid_argument("WForm: need at least 2 cells");
  WForm out;
  out.n_cells = n_cells;
  out.w.resize(n_cells);
  out.dw.resize(n_cells);
  double mass = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    const double x = cell_center(i, n_cells);
    out.w[i] = w(x);
    out.dw[i] = dw(x);
    mass += std::exp(-out.w[i]);
  }
  check_normalization(mass / n_cells, "WForm");
  return out;
}

WForm WForm::from_density(const DensityPair& d) {
  if (d.rho_plus != d.rho_minus)
    throw std::invalid_argument("WForm::from_density: common density required");
  WForm out;
  out.n_cells = d.n_cells;
  out.w.resize(d.n_cells);
  out.dw.resize(d.n_cells);
  for (int i = 0; i < d.n_cells; ++i) {
    if (d.rho_plus[i] <= 0.0)
      throw std::domain_error("WForm::from_density: density must be strictly positive");
    out.w[i] = -std::log(d.rho_plus[i]);
    out.dw[i] = -d.drho_plus[i] / d.rho_plus[i];
  }
  return out;
}

WForm WForm::stationary(const Potential& potential, int n_cells) {
  return from_density(DensityPair::stationary(potential, n_cells));
}

std::string to_string(RateBranch b) {
  switch (b) {
    case RateBranch::general: return "general";
    case RateBranch::constant: return "constant";
    case RateBranch::infinite: return "infinite";
    case RateBranch::w_form: return "w-form";
    case RateBranch::gamma_zero: return "gamma-zero";
  }
  return "?";
}

namespace {

struct RateInputs {
  std::vector<double> lp, lm;
};

// Common preconditions of the explicit branches.
RateInputs prepare(const DensityPair& d, const SwitchingRate& rate) {
  RateInputs in;
  in.lp = lambdas_on_grid(rate, d.n_cells, +1);
  in.lm = lambdas_on_grid(rate, d.n_cells, -1);
  for (int i = 0; i < d.n_cells; ++i)
    if (in.lp[i] * in.lm[i] <= 0.0)
      throw std::domain_error(
          "rate function: lambda+ lambda- vanishes on the grid; the explicit "
          "formula needs strictly positive rates (see the gamma->0 branch)");
  return in;
}

bool derivatives_match(const DensityPair& d) {
  double sup_diff = 0.0, sup_dp = 0.0;
  for (int i = 0; i < d.n_cells; ++i) {
    sup_diff = std::max(sup_diff, std::abs(d.drho_plus[i] - d.drho_minus[i]));
    sup_dp = std::max(sup_dp, std::abs(d.drho_plus[i]));
  }
  return sup_diff <= 1e-8 * (1.0 + sup_dp);
}

bool is_flat(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-14 * (1.0 + std::abs(*hi));
}

}  // namespace

RateReport rate_explicit(const DensityPair& d, const SwitchingRate& rate) {
  const RateInputs in = prepare(d, rate);
  RateReport report;
  report.n_cells = d.n_cells;

  if (!derivatives_match(d)) {
    report.branch = RateBranch::infinite;
    report.value = kInfiniteRate;
    return report;
  }

  double sup_deriv = 0.0;
  for (double v : d.drho_plus) sup_deriv = std::max(sup_deriv, std::abs(v));
  const bool flat = is_flat(d.rho_plus) && is_flat(d.rho_minus) && sup_deriv <= 1e-12;
  report.integrand.resize(d.n_cells);

  if (flat) {
    // Constant-density branch; valid for rho >= 0.
    report.branch = RateBranch::constant;
    for (int i = 0; i < d.n_cells; ++i) {
      if (d.rho_plus[i] < 0.0 || d.rho_minus[i] < 0.0)
        throw std::domain_error("rate_explicit: negative density");
      const double sp = std::sqrt(in.lp[i] * d.rho_plus[i]);
      const double sm = std::sqrt(in.lm[i] * d.rho_minus[i]);
      report.integrand[i] = (sp - sm) * (sp - sm);
    }
    report.value = quadrature(report.integrand);
    return report;
  }

  report.branch = RateBranch::general;
  for (int i = 0; i < d.n_cells; ++i) {
    const double rp = d.rho_plus[i], rm = d.rho_minus[i];
    if (rp <= 0.0 || rm <= 0.0)
      throw std::domain_error("rate_explicit: general branch needs strictly positive densities");
    const double rd = d.drho_plus[i];  // the common derivative
    const double prod = in.lp[i] * in.lm[i] * rp * rm;
    report.integrand[i] = 0.5 * rd * std::log(in.lp[i] * rp / (in.lm[i] * rm)) +
                          rd * std::asinh(rd / (2.0 * std::sqrt(prod))) -
                          std::sqrt(4.0 * prod + rd * rd) + in.lp[i] * rp + in.lm[i] * rm;
  }
  report.value = quadrature(report.integrand);
  return report;
}

std::vector<double> optimal_tilt(const DensityPair& d, const SwitchingRate& rate) {
  const RateInputs in = prepare(d, rate);
  std::vector<double> tilt(d.n_cells);
  for (int i = 0; i < d.n_cells; ++i) {
    const double rp = d.rho_plus[i], rm = d.rho_minus[i];
    if (rp <= 0.0 || rm <= 0.0)
      throw std::domain_error("optimal_tilt: strictly positive densities required");
    const double rd = d.drho_plus[i];
    tilt[i] = 0.5 * std::log(in.lp[i] * rp / (in.lm[i] * rm)) +
              std::asinh(rd / (2.0 * std::sqrt(in.lp[i] * in.lm[i] * rp * rm)));
  }
  return tilt;
}

double tilt_objective(const DensityPair& d, const SwitchingRate& rate,
                      std::span<const double> tilt) {
  if (static_cast<int>(tilt.size()) != d.n_cells)
    throw std::invalid_argument("tilt_objective: tilt size mismatch");
  const RateInputs in = prepare(d, rate);
  std::vector<double> integrand(d.n_cells);
  for (int i = 0; i < d.n_cells; ++i) {
    const double rd = d.drho_plus[i];
    integrand[i] = -rd * tilt[i] + in.lp[i] * d.rho_plus[i] * std::expm1(-tilt[i]) +
                   in.lm[i] * d.rho_minus[i] * std::expm1(tilt[i]);
  }
  return quadrature(integrand);
}

RateReport rate_w_form(const WForm& w, const SwitchingRate& rate) {
  const int n = w.n_cells;
  RateReport report;
  report.n_cells = n;
  report.branch = RateBranch::w_form;
  report.integrand.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = cell_center(i, n);
    const double lp = rate.lambda_plus(x), lm = rate.lambda_minus(x);
    if (lp * lm <= 0.0)
      throw std::domain_error("rate_w_form: lambda+ lambda- must be strictly positive");
    const double dw = w.dw[i];
    const double bracket = -0.5 * dw * std::log(lp / lm) +
                           dw * std::asinh(dw / (2.0 * std::sqrt(lp * lm))) -
                           std::sqrt(4.0 * lp * lm + dw * dw) + lp + lm;
    report.integrand[i] = bracket * std::exp(-w.w[i]);
  }
  report.value = quadrature(report.integrand);
  return report;
}

GammaDerivativeReport gamma_derivative(const WForm& w, const SwitchingRate& rate) {
  if (rate.gamma() <= 0.0)
    throw std::domain_error("gamma_derivative: gamma must be positive (division by lambda+ lambda-)");
  const int n = w.n_cells;
  GammaDerivativeReport report;
  report.per_cell.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = cell_center(i, n);
    const double lp = rate.lambda_plus(x), lm = rate.lambda_minus(x);
    const double dw = w.dw[i];
    const double root = std::sqrt(4.0 * lp * lm + dw * dw);
    report.per_cell[i] = (4.0 * lp * lm + (lp - lm) * dw - (lp + lm) * root) /
                         (2.0 * lp * lm) * std::exp(-w.w[i]);
  }
  report.integral = quadrature(report.per_cell);
  return report;
}

GammaZeroReport rate_gamma_zero(const WForm& w, const Potential& potential) {
  const int n = w.n_cells;
  GammaZeroReport report;
  report.n_cells = n;
  report.branch = RateBranch::gamma_zero;
  report.integrand.assign(n, 0.0);

  std::vector<double> du(n);
  for (int i = 0; i < n; ++i) {
    du[i] = potential.deriv(cell_center(i, n));
    if (std::abs(du[i]) <= 1e-12) report.flagged_cells.push_back(i);
  }
  if (static_cast<int>(report.flagged_cells.size()) == n)
    throw std::invalid_argument("rate_gamma_zero: U' vanishes on the whole grid");

  std::size_t next_flag = 0;
  for (int i = 0; i < n; ++i) {
    if (next_flag < report.flagged_cells.size() && report.flagged_cells[next_flag] == i) {
      ++next_flag;  // {U'=0} cells are excluded from the quadrature
      continue;
    }
    const double dw = w.dw[i];
    const double weight = std::exp(-w.w[i]);
    if (dw == 0.0) {
      report.integrand[i] = std::abs(du[i]) * weight;  // |W'| log(W'/U') -> 0
      continue;
    }
    if ((dw > 0.0) != (du[i] > 0.0)) {
      report.value = kInfiniteRate;
      report.branch = RateBranch::infinite;
      return report;
    }
    report.integrand[i] =
        (std::abs(dw) * (std::log(dw / du[i]) - 1.0) + std::abs(du[i])) * weight;
  }
  report.value = quadrature(report.integrand);
  return report;
}

AsymmetryScan scan_velocity_asymmetry(const DensityPair& common, const SwitchingRate& rate,
                                      std::span<const double> c_values) {
  if (c_values.empty()) throw std::invalid_argument("scan_velocity_asymmetry: empty scan");
  AsymmetryScan scan;
  scan.c_values.assign(c_values.begin(), c_values.end());
  double best = kInfiniteRate;
  for (double c : c_values) {
    const double value = rate_explicit(common.velocity_offset(c), rate).value;
    scan.values.push_back(value);
    if (value < best) {
      best = value;
      scan.argmin_c = c;
    }
  }
  return scan;
}

}  // namespace zigzag
