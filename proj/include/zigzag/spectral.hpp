#ifndef ZIGZAG_SPECTRAL_HPP
#define ZIGZAG_SPECTRAL_HPP

#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "zigzag/potential.hpp"
#include "zigzag/ratefn.hpp"

namespace zigzag {

// Metzler rate matrix discretizing the zig-zag generator on the torus grid:
// upwind advection at rate n (flow i -> i+1 for v=+1, i -> i-1 for v=-1,
// both mod n) plus switching (i,v) -> (i,-v) at rate lambda(x_i, v);
// diagonal entries make every row sum to zero.
//
// State indexing: (cell i, v=+1) -> i, (cell i, v=-1) -> n + i.
class GridGenerator {
 public:
  GridGenerator(const SwitchingRate& rate, int n_cells);

  int n_cells() const { return n_cells_; }
  int size() const { return 2 * n_cells_; }
  double x_center(int cell) const { return (cell + 0.5) / n_cells_; }
  static int index(int cell, int v, int n_cells) { return v > 0 ? cell : n_cells + cell; }

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return q_; }

  // Reachability scan over positive off-diagonal entries.
  bool irreducible() const;

 private:
  int n_cells_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> q_;
};

struct EigenResult {
  double beta = 0.0;
  Eigen::VectorXd right;  // strictly positive, sup-norm 1
  Eigen::VectorXd left;   // strictly positive, <left, right> = 1
  int iterations = 0;
  double residual = 0.0;
};

// Donsker-Varadhan value -inf_{u>0} sum_i w_i (Qu)_i / u_i for a nonnegative
// weight vector w, by damped Newton over phi = log u with the phi_0 = 0 gauge.
// Homogeneous of degree 1 in w: callers pick the pairing normalization
// (probability vector for duality, density*dx weights for the comparison
// against the explicit torus formula).
double dv_rate_discrete(const GridGenerator& g, const Eigen::VectorXd& weights);

// Perron pair of Q + diag(V) by power iteration on I + h(Q + diag(V) - cI).
EigenResult principal_eigenvalue(const GridGenerator& g, const Eigen::VectorXd& v_observable);

// |beta - (<mu*, V> - dv(mu*))| with mu* = left.*right normalized to the
// simplex; finite-state Donsker-Varadhan duality, zero up to solver error.
double duality_check(const GridGenerator& g, const Eigen::VectorXd& v_observable);

// max over theta of {theta a - beta(theta V)}, golden-section refined around
// the grid argmax.
double legendre_rate(const GridGenerator& g, const Eigen::VectorXd& v_observable, double level,
                     std::span<const double> theta_grid);

// Stationary probability vector of the generator (left Perron vector at V=0).
Eigen::VectorXd discrete_stationary(const GridGenerator& g);

// Per-state weights rho^v(x_i) dx pairing a DensityPair with grid functions;
// this is the discrete analogue of sum_v int f rho^v dx (total mass 2).
Eigen::VectorXd pairing_weights(const DensityPair& d);

// Observable values on the 2n states.
Eigen::VectorXd grid_observable(const GridGenerator& g,
                                const std::function<double(double, int)>& f);

std::vector<double> default_theta_grid();

}  // namespace zigzag

#endif
