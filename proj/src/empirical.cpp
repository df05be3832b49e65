#include "zigzag/empirical.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace zigzag {

EmpiricalMeasure::EmpiricalMeasure(int n_cells) : n_cells_(n_cells) {
  if (n_cells < 2) throw std::invalid_argument("EmpiricalMeasure: need at least 2 cells");
  occ_plus_.assign(n_cells, 0.0);
  occ_minus_.assign(n_cells, 0.0);
}

namespace {

// Walk a unit-speed segment of given duration starting at x0 with velocity v,
// splitting the elapsed time exactly over the cells it crosses.
void deposit(std::vector<double>& occ, int n, double x0, int v, double duration) {
  double pos = wrap_torus(x0);
  double remaining = duration;
  const double dx = 1.0 / n;
  while (remaining > 0.0) {
    int cell = static_cast<int>(pos * n);
    if (cell >= n) cell = n - 1;
    double to_edge;
    if (v > 0) {
      to_edge = (cell + 1) * dx - pos;
      if (to_edge <= 0.0) to_edge = dx;  // sitting on the upper edge
    } else {
      to_edge = pos - cell * dx;
      if (to_edge <= 0.0) {  // sitting on the lower edge: moving into cell-1
        cell = (cell - 1 + n) % n;
        to_edge = dx;
      }
    }
    const double step = std::min(remaining, to_edge);
    occ[cell] += step;
    remaining -= step;
    pos = wrap_torus(pos + v * step);
    if (step == 0.0) break;  // defensive; cannot make progress
  }
}

}  // namespace

void EmpiricalMeasure::add(const Skeleton& sk) {
  if (sk.domain != DomainKind::torus)
    throw std::invalid_argument("EmpiricalMeasure: line-domain skeletons are unsupported");
  double t0 = 0.0;
  double x0 = sk.initial.x;
  int v0 = sk.initial.v;
  for (const SkeletonEvent& e : sk.events) {
    deposit(v0 > 0 ? occ_plus_ : occ_minus_, n_cells_, x0, v0, e.t - t0);
    t0 = e.t;
    x0 = e.x;
    v0 = e.v;
  }
  deposit(v0 > 0 ? occ_plus_ : occ_minus_, n_cells_, x0, v0, sk.t_final - t0);
  t_total_ += sk.t_final;
}

void EmpiricalMeasure::merge(const EmpiricalMeasure& other) {
  if (other.n_cells_ != n_cells_) throw std::invalid_argument("merge: grid size mismatch");
  for (int i = 0; i < n_cells_; ++i) {
    occ_plus_[i] += other.occ_plus_[i];
    occ_minus_[i] += other.occ_minus_[i];
  }
  t_total_ += other.t_total_;
}

double EmpiricalMeasure::occupancy(int cell, int v) const {
  return v > 0 ? occ_plus_.at(cell) : occ_minus_.at(cell);
}

std::vector<double> EmpiricalMeasure::x_marginal() const {
  std::vector<double> m(n_cells_);
  for (int i = 0; i < n_cells_; ++i) m[i] = (occ_plus_[i] + occ_minus_[i]) / t_total_;
  return m;
}

double EmpiricalMeasure::velocity_fraction(int v) const {
  double s = 0.0;
  const std::vector<double>& occ = v > 0 ? occ_plus_ : occ_minus_;
  for (double o : occ) s += o;
  return s / t_total_;
}

double EmpiricalMeasure::probability(int cell, int v) const {
  return occupancy(cell, v) / t_total_;
}

EmpiricalMeasure accumulate(const Skeleton& sk, int n_cells) {
  EmpiricalMeasure m(n_cells);
  m.add(sk);
  return m;
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1,1].
constexpr std::array<double, 8> gl_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double segment_integral(const Observable& obs, double x0, int v, double duration,
                        DomainKind domain) {
  double s = 0.0;
  for (int q = 0; q < 8; ++q) {
    const double tau = 0.5 * duration * (gl_nodes[q] + 1.0);
    s += gl_weights[q] * obs(wrap(x0 + v * tau, domain), v);
  }
  return 0.5 * duration * s;
}

}  // namespace

double path_integral(const Skeleton& sk, const Observable& obs) {
  double total = 0.0;
  double t0 = 0.0;
  double x0 = sk.initial.x;
  int v0 = sk.initial.v;
  for (const SkeletonEvent& e : sk.events) {
    total += segment_integral(obs, x0, v0, e.t - t0, sk.domain);
    t0 = e.t;
    x0 = e.x;
    v0 = e.v;
  }
  total += segment_integral(obs, x0, v0, sk.t_final - t0, sk.domain);
  return total;
}

double time_average(const Skeleton& sk, const Observable& obs) {
  if (sk.t_final <= 0.0) throw std::invalid_argument("time_average: empty time horizon");
  return path_integral(sk, obs) / sk.t_final;
}

bool observable_bounded(const Observable& obs, int scan_cells) {
  for (int i = 0; i < scan_cells; ++i) {
    const double x = (i + 0.5) / scan_cells;
    if (!std::isfinite(obs(x, +1)) || !std::isfinite(obs(x, -1))) return false;
  }
  return true;
}

double tv_distance(const EmpiricalMeasure& m, const std::vector<double>& density) {
  if (static_cast<int>(density.size()) != m.n_cells())
    throw std::invalid_argument("tv_distance: grid size mismatch");
  const std::vector<double> marginal = m.x_marginal();
  const double dx = 1.0 / m.n_cells();
  double tv = 0.0;
  for (int i = 0; i < m.n_cells(); ++i) tv += std::abs(marginal[i] - density[i] * dx);
  return 0.5 * tv;
}

}  // namespace zigzag
