#ifndef ZIGZAG_FOURIER_HPP
#define ZIGZAG_FOURIER_HPP

#include <span>
#include <vector>

namespace zigzag {

// Real trigonometric interpolant through samples of a smooth 1-periodic
// function at the cell centers x_j = (j+1/2)/n. Frequencies above
// floor((n-1)/2) are dropped; for smooth inputs their coefficients are at
// rounding level. Evaluation and the first two derivatives are closed-form,
// which is what makes tabulated inputs usable by the thinning bounds.
class TrigSeries {
 public:
  static TrigSeries fit(std::span<const double> values);

  double value(double x) const;
  double deriv(double x) const;
  double second_deriv(double x) const;

 private:
  std::vector<double> cos_coef_;  // index k = 0..K
  std::vector<double> sin_coef_;
};

// Spectral derivative: fit the interpolant and evaluate its derivative back
// at the same cell centers.
std::vector<double> spectral_derivative(std::span<const double> values);

}  // namespace zigzag

#endif
