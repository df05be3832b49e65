#ifndef ZIGZAG_EMPIRICAL_HPP
#define ZIGZAG_EMPIRICAL_HPP

#include <functional>
#include <vector>

#include "zigzag/sampler.hpp"

namespace zigzag {

// Time-weighted occupancy of grid cells x velocities: the empirical measure
// of a trajectory, stored as absolute time so that accumulation is additive.
// Cells are the half-open intervals [i/n, (i+1)/n).
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(int n_cells);

  // Exact segment-by-segment deposit of a torus skeleton.
  void add(const Skeleton& sk);
  void merge(const EmpiricalMeasure& other);

  int n_cells() const { return n_cells_; }
  double t_total() const { return t_total_; }
  double occupancy(int cell, int v) const;

  // Normalized x-marginal: cell masses summing to 1.
  std::vector<double> x_marginal() const;
  // Fraction of time spent at velocity v.
  double velocity_fraction(int v) const;
  // Normalized per-(cell,v) probabilities.
  double probability(int cell, int v) const;

 private:
  int n_cells_;
  double t_total_ = 0.0;
  std::vector<double> occ_plus_;
  std::vector<double> occ_minus_;
};

EmpiricalMeasure accumulate(const Skeleton& sk, int n_cells);

// Bounded observable f(x,v) on the torus.
struct Observable {
  std::function<double(double, int)> f;
  bool velocity_dependent = false;

  double operator()(double x, int v) const { return f(x, v); }
};

// Grid scan for finite values; how Observable's boundedness promise gets
// checked before long runs.
bool observable_bounded(const Observable& obs, int scan_cells = 1024);

// (1/t) int_0^t f(X_s, V_s) ds via 8-point Gauss-Legendre on each linear
// segment (exact for the polynomial observables used in tests).
double time_average(const Skeleton& sk, const Observable& obs);

// Path integral int_0^t f ds (same quadrature, no 1/t).
double path_integral(const Skeleton& sk, const Observable& obs);

// (1/2) sum_i |m_i - p_i dx| between the normalized x-marginal of m and a
// density vector p given at cell centers.
double tv_distance(const EmpiricalMeasure& m, const std::vector<double>& density);

}  // namespace zigzag

#endif
