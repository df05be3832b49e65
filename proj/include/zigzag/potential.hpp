#ifndef ZIGZAG_POTENTIAL_HPP
#define ZIGZAG_POTENTIAL_HPP

#include <string>
#include <vector>

#include "zigzag/domain.hpp"
#include "zigzag/fourier.hpp"

namespace zigzag {

enum class PotentialKind { zero, cosine, quadratic, power, tabulated };

// The potential U defining the target density exp(-U) and, through U', the
// canonical switching intensities. All kinds expose U, U' and U''; the second
// derivative feeds the thinning envelopes.
//
// Torus kinds (zero, cosine, tabulated) are 1-periodic by construction.
// Line kinds: quadratic U = a x^2/2 and power U = |x|^p / p (the latter is
// the auxiliary-potential shape used by the growth-condition diagnostics).
class Potential {
 public:
  static Potential zero();
  static Potential cosine(double amplitude, int frequency, double phase = 0.0);
  static Potential quadratic(double scale);
  static Potential power(double exponent);
  static Potential tabulated(std::vector<double> values);

  double value(double x) const;
  double deriv(double x) const;
  double second_deriv(double x) const;

  PotentialKind kind() const { return kind_; }
  bool torus_compatible() const;
  bool line_compatible() const;

  double amplitude() const { return amplitude_; }
  int frequency() const { return frequency_; }
  double phase() const { return phase_; }
  double scale() const { return scale_; }
  double exponent() const { return exponent_; }
  const std::vector<double>& table() const { return table_; }

 private:
  Potential() = default;

  PotentialKind kind_ = PotentialKind::zero;
  double amplitude_ = 0.0;
  int frequency_ = 0;
  double phase_ = 0.0;
  double scale_ = 0.0;
  double exponent_ = 0.0;
  std::vector<double> table_;
  TrigSeries series_;
};

// Switching intensity lambda(x,v) = max(0, v U'(x)) + gamma: the canonical
// part driven by the potential plus a constant refreshment rate gamma >= 0.
class SwitchingRate {
 public:
  SwitchingRate(Potential potential, double gamma);

  double lambda(double x, int v) const;
  double lambda_plus(double x) const { return lambda(x, +1); }
  double lambda_minus(double x) const { return lambda(x, -1); }

  double gamma() const { return gamma_; }
  const Potential& potential() const { return potential_; }

 private:
  Potential potential_;
  double gamma_;
};

// exp(-U)/Z at the n cell centers (i+1/2)/n, Z from the periodic trapezoid
// rule on the same grid, so dx * sum(density) == 1 to rounding. Torus only.
std::vector<double> stationary_density(const Potential& potential, int n_cells);

// Upper bound for sup of lambda(x + v s, v) over s in [0, horizon]: grid
// maximum over the segment plus the Lipschitz margin horizon * sup|U''|.
double local_rate_bound(const SwitchingRate& rate, double x, int v, double horizon);

// Growth-condition diagnostics for the line-domain LDP hypotheses. These are
// finite-radius trend checks, not statements about true limits; the report
// carries the heuristic marker.
struct GrowthRatio {
  std::string condition;            // e.g. "B.2"
  std::string description;          // e.g. "U'/U -> 0"
  std::vector<double> radii;
  std::vector<double> values_pos;   // evaluated at +r
  std::vector<double> values_neg;   // evaluated at -r
  bool trending_pass = false;
};

struct GrowthReport {
  std::vector<GrowthRatio> ratios;
  bool all_pass = false;
  std::string note;  // heuristic disclaimer
};

GrowthReport check_growth_conditions(const Potential& u, const Potential& aux,
                                     const std::vector<double>& radii);

}  // namespace zigzag

#endif
