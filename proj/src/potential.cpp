#include "zigzag/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace zigzag {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

Potential Potential::zero() {
  Potential p;
  p.kind_ = PotentialKind::zero;
  return p;
}

Potential Potential::cosine(double amplitude, int frequency, double phase) {
  if (frequency < 1) throw std::invalid_argument("cosine potential: frequency must be a positive integer");
  Potential p;
  p.kind_ = PotentialKind::cosine;
  p.amplitude_ = amplitude;
  p.frequency_ = frequency;
  p.phase_ = phase;
  return p;
}

Potential Potential::quadratic(double scale) {
  Potential p;
  p.kind_ = PotentialKind::quadratic;
  p.scale_ = scale;
  return p;
}

Potential Potential::power(double exponent) {
  if (exponent <= 1.0) throw std::invalid_argument("power potential: exponent must exceed 1");
  Potential p;
  p.kind_ = PotentialKind::power;
  p.exponent_ = exponent;
  return p;
}

Potential Potential::tabulated(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("tabulated potential: need at least 2 values");
  Potential p;
  p.kind_ = PotentialKind::tabulated;
  p.series_ = TrigSeries::fit(values);
  p.table_ = std::move(values);
  return p;
}

double Potential::value(double x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::cosine: return amplitude_ * std::cos(two_pi * frequency_ * x + phase_);
    case PotentialKind::quadratic: return 0.5 * scale_ * x * x;
    case PotentialKind::power: return std::pow(std::abs(x), exponent_) / exponent_;
    case PotentialKind::tabulated: return series_.value(wrap_torus(x));
  }
  return 0.0;
}

double Potential::deriv(double x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::cosine:
      return -amplitude_ * two_pi * frequency_ * std::sin(two_pi * frequency_ * x + phase_);
    case PotentialKind::quadratic: return scale_ * x;
    case PotentialKind::power: {
      if (x == 0.0) return 0.0;
      const double s = x > 0 ? 1.0 : -1.0;
      return s * std::pow(std::abs(x), exponent_ - 1.0);
    }
    case PotentialKind::tabulated: return series_.deriv(wrap_torus(x));
  }
  return 0.0;
}

double Potential::second_deriv(double x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::cosine: {
      const double w = two_pi * frequency_;
      return -amplitude_ * w * w * std::cos(w * x + phase_);
    }
    case PotentialKind::quadratic: return scale_;
    case PotentialKind::power:
      if (x == 0.0) return 0.0;
      return (exponent_ - 1.0) * std::pow(std::abs(x), exponent_ - 2.0);
    case PotentialKind::tabulated: return series_.second_deriv(wrap_torus(x));
  }
  return 0.0;
}

bool Potential::torus_compatible() const {
  return kind_ == PotentialKind::zero || kind_ == PotentialKind::cosine ||
         kind_ == PotentialKind::tabulated;
}

bool Potential::line_compatible() const {
  return kind_ == PotentialKind::zero || kind_ == PotentialKind::quadratic ||
         kind_ == PotentialKind::power;
}

SwitchingRate::SwitchingRate(Potential potential, double gamma)
    : potential_(std::move(potential)), gamma_(gamma) {
  if (gamma < 0.0) throw std::domain_error("gamma must be nonnegative");
}

double SwitchingRate::lambda(double x, int v) const {
  return std::max(0.0, v * potential_.deriv(x)) + gamma_;
}

std::vector<double> stationary_density(const Potential& potential, int n_cells) {
  if (!potential.torus_compatible())
    throw std::invalid_argument("stationary_density: unsupported domain (torus potential required)");
  if (n_cells < 2) throw std::invalid_argument("stationary_density: need at least 2 cells");
  std::vector<double> density(n_cells);
  double z = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    density[i] = std::exp(-potential.value((i + 0.5) / n_cells));
    z += density[i];
  }
  z /= n_cells;  // periodic trapezoid: dx * sum
  for (double& d : density) d /= z;
  return density;
}

double local_rate_bound(const SwitchingRate& rate, double x, int v, double horizon) {
  if (horizon <= 0.0) throw std::invalid_argument("local_rate_bound: horizon must be positive");
  constexpr int refinement = 16;
  const Potential& u = rate.potential();
  double max_rate = 0.0;
  double max_curv = 0.0;
  for (int j = 0; j <= refinement; ++j) {
    const double xi = x + v * horizon * j / refinement;
    max_rate = std::max(max_rate, std::max(0.0, v * u.deriv(xi)));
    max_curv = std::max(max_curv, std::abs(u.second_deriv(xi)));
  }
  return rate.gamma() + max_rate + horizon * max_curv;
}

namespace {

// |a/b| with the convention that a zero denominator yields +inf (the trend
// check then fails, which is the conservative outcome).
double abs_ratio(double a, double b) {
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(a / b);
}

GrowthRatio make_ratio(std::string condition, std::string description,
                       const std::vector<double>& radii,
                       const std::function<double(double)>& f, bool want_decreasing) {
  GrowthRatio g;
  g.condition = std::move(condition);
  g.description = std::move(description);
  g.radii = radii;
  for (double r : radii) {
    g.values_pos.push_back(f(r));
    g.values_neg.push_back(f(-r));
  }
  g.trending_pass = true;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const bool pos_ok = want_decreasing
                            ? std::abs(g.values_pos[i + 1]) < std::abs(g.values_pos[i])
                            : std::abs(g.values_pos[i + 1]) > std::abs(g.values_pos[i]);
    const bool neg_ok = want_decreasing
                            ? std::abs(g.values_neg[i + 1]) < std::abs(g.values_neg[i])
                            : std::abs(g.values_neg[i + 1]) > std::abs(g.values_neg[i]);
    if (!pos_ok || !neg_ok) g.trending_pass = false;
  }
  return g;
}

}  // namespace

GrowthReport check_growth_conditions(const Potential& u, const Potential& aux,
                                     const std::vector<double>& radii) {
  if (!u.line_compatible() || !aux.line_compatible())
    throw std::invalid_argument("check_growth_conditions: unsupported domain (line potentials required)");
  if (radii.size() < 3) throw std::invalid_argument("check_growth_conditions: need at least 3 radii");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw std::invalid_argument("check_growth_conditions: radii must be increasing");

  GrowthReport report;
  report.note =
      "heuristic finite-radius trend check; asymptotic conditions cannot be "
      "verified by finite evaluation";

  auto uval = [&](double x) { return u.value(x); };
  auto uder = [&](double x) { return u.deriv(x); };
  auto vval = [&](double x) { return aux.value(x); };
  auto vder = [&](double x) { return aux.deriv(x); };

  report.ratios.push_back(make_ratio("B.1a", "U -> inf", radii, uval, false));
  report.ratios.push_back(make_ratio("B.1b", "U' -> +-inf", radii, uder, false));
  report.ratios.push_back(make_ratio(
      "B.2", "U'/U -> 0", radii, [&](double x) { return abs_ratio(u.deriv(x), u.value(x)); }, true));
  report.ratios.push_back(make_ratio(
      "B.3", "U''/U' -> 0", radii,
      [&](double x) { return abs_ratio(u.second_deriv(x), u.deriv(x)); }, true));
  report.ratios.push_back(make_ratio("C.1a", "V -> inf", radii, vval, false));
  report.ratios.push_back(make_ratio("C.1b", "V' -> +-inf", radii, vder, false));
  report.ratios.push_back(make_ratio(
      "C.2a", "V/U -> 0", radii, [&](double x) { return abs_ratio(aux.value(x), u.value(x)); },
      true));
  report.ratios.push_back(make_ratio(
      "C.2b", "U'/V -> 0", radii, [&](double x) { return abs_ratio(u.deriv(x), aux.value(x)); },
      true));
  report.ratios.push_back(make_ratio(
      "C.2c", "V'/U' -> 0", radii, [&](double x) { return abs_ratio(aux.deriv(x), u.deriv(x)); },
      true));
  report.ratios.push_back(make_ratio(
      "C.3", "U''/V' -> 0", radii,
      [&](double x) { return abs_ratio(u.second_deriv(x), aux.deriv(x)); }, true));

  report.all_pass = std::all_of(report.ratios.begin(), report.ratios.end(),
                                [](const GrowthRatio& g) { return g.trending_pass; });
  return report;
}

}  // namespace zigzag
