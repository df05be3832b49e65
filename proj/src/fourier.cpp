#include "zigzag/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zigzag {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TrigSeries TrigSeries::fit(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("TrigSeries::fit needs at least 2 samples");
  const int max_freq = (n - 1) / 2;

  TrigSeries s;
  s.cos_coef_.assign(max_freq + 1, 0.0);
  s.sin_coef_.assign(max_freq + 1, 0.0);
  for (int k = 0; k <= max_freq; ++k) {
    double ac = 0.0, as = 0.0;
    for (int j = 0; j < n; ++j) {
      const double arg = two_pi * k * (j + 0.5) / n;
      ac += values[j] * std::cos(arg);
      as += values[j] * std::sin(arg);
    }
    const double scale = (k == 0) ? 1.0 / n : 2.0 / n;
    s.cos_coef_[k] = scale * ac;
    s.sin_coef_[k] = scale * as;
  }
  return s;
}

double TrigSeries::value(double x) const {
  double out = cos_coef_[0];
  for (std::size_t k = 1; k < cos_coef_.size(); ++k) {
    const double arg = two_pi * static_cast<double>(k) * x;
    out += cos_coef_[k] * std::cos(arg) + sin_coef_[k] * std::sin(arg);
  }
  return out;
}

double TrigSeries::deriv(double x) const {
  double out = 0.0;
  for (std::size_t k = 1; k < cos_coef_.size(); ++k) {
    const double w = two_pi * static_cast<double>(k);
    const double arg = w * x;
    out += w * (-cos_coef_[k] * std::sin(arg) + sin_coef_[k] * std::cos(arg));
  }
  return out;
}

double TrigSeries::second_deriv(double x) const {
  double out = 0.0;
  for (std::size_t k = 1; k < cos_coef_.size(); ++k) {
    const double w = two_pi * static_cast<double>(k);
    const double arg = w * x;
    out -= w * w * (cos_coef_[k] * std::cos(arg) + sin_coef_[k] * std::sin(arg));
  }
  return out;
}

std::vector<double> spectral_derivative(std::span<const double> values) {
  const TrigSeries s = TrigSeries::fit(values);
  const int n = static_cast<int>(values.size());
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = s.deriv((j + 0.5) / n);
  return out;
}

}  // namespace zigzag
