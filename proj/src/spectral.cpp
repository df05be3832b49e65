#include "zigzag/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

#include "zigzag/errors.hpp"

namespace zigzag {

GridGenerator::GridGenerator(const SwitchingRate& rate, int n_cells) : n_cells_(n_cells) {
  if (n_cells < 2) throw std::invalid_argument("GridGenerator: need at least 2 cells");
  if (!rate.potential().torus_compatible())
    throw std::invalid_argument("GridGenerator: torus potential required");

  const double advection = static_cast<double>(n_cells);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(6 * n_cells);
  for (int i = 0; i < n_cells; ++i) {
    const double x = x_center(i);
    const double lp = rate.lambda(x, +1);
    const double lm = rate.lambda(x, -1);
    const int up = index(i, +1, n_cells);
    const int down = index(i, -1, n_cells);
    entries.emplace_back(up, index((i + 1) % n_cells, +1, n_cells), advection);
    entries.emplace_back(up, down, lp);
    entries.emplace_back(up, up, -(advection + lp));
    entries.emplace_back(down, index((i - 1 + n_cells) % n_cells, -1, n_cells), advection);
    entries.emplace_back(down, up, lm);
    entries.emplace_back(down, down, -(advection + lm));
  }
  q_.resize(2 * n_cells, 2 * n_cells);
  q_.setFromTriplets(entries.begin(), entries.end());
  q_.makeCompressed();
}

bool GridGenerator::irreducible() const {
  const int n = size();
  // Forward reachability from state 0; strong connectivity follows if the
  // reverse scan also reaches everything.
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop();
      for (int row = 0; row < n; ++row) {
        if (!transpose && row != s) continue;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q_, row); it; ++it) {
          const int from = transpose ? static_cast<int>(it.col()) : row;
          const int to = transpose ? row : static_cast<int>(it.col());
          if (from != s || to == from || it.value() <= 0.0) continue;
          if (!seen[to]) {
            seen[to] = 1;
            ++count;
            queue.push(to);
          }
        }
      }
    }
    return count == n;
  };
  return reach(false) && reach(true);
}

Eigen::VectorXd grid_observable(const GridGenerator& g,
                                const std::function<double(double, int)>& f) {
  const int n = g.n_cells();
  Eigen::VectorXd v(2 * n);
  for (int i = 0; i < n; ++i) {
    v[GridGenerator::index(i, +1, n)] = f(g.x_center(i), +1);
    v[GridGenerator::index(i, -1, n)] = f(g.x_center(i), -1);
  }
  return v;
}

Eigen::VectorXd pairing_weights(const DensityPair& d) {
  const int n = d.n_cells;
  Eigen::VectorXd w(2 * n);
  for (int i = 0; i < n; ++i) {
    w[GridGenerator::index(i, +1, n)] = d.rho_plus[i] / n;
    w[GridGenerator::index(i, -1, n)] = d.rho_minus[i] / n;
  }
  return w;
}

double dv_rate_discrete(const GridGenerator& g, const Eigen::VectorXd& weights) {
  const int n = g.size();
  if (weights.size() != n) throw std::invalid_argument("dv_rate_discrete: weight size mismatch");
  if (weights.minCoeff() < 0.0 || !(weights.sum() > 0.0))
    throw std::invalid_argument("dv_rate_discrete: weights must be nonnegative with positive sum");
  if (!g.irreducible()) throw std::invalid_argument("dv_rate_discrete: generator not irreducible");

  const auto& q = g.matrix();

  // Objective F(phi) = sum_i w_i sum_{j != i} Q_ij (e^{phi_j - phi_i} - 1),
  // convex in phi, invariant under constant shifts; phi_0 is pinned to 0.
  auto objective = [&](const Eigen::VectorXd& phi) {
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      if (weights[i] == 0.0) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, i); it; ++it) {
        if (it.col() == i) continue;
        f += weights[i] * it.value() * std::expm1(phi[it.col()] - phi[i]);
      }
    }
    return f;
  };

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  const int max_iterations = 10000;
  const double grad_tol = 1e-10;
  double grad_norm = 0.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    // W_ij = w_i Q_ij e^{phi_j - phi_i} for j != i; gradient and Hessian of F.
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> hess_entries;
    hess_entries.reserve(8 * n);
    Eigen::VectorXd hess_diag = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, i); it; ++it) {
        const int j = static_cast<int>(it.col());
        if (j == i) continue;
        const double wij = weights[i] * it.value() * std::exp(phi[j] - phi[i]);
        grad[j] += wij;
        grad[i] -= wij;
        hess_diag[i] += wij;
        hess_diag[j] += wij;
        hess_entries.emplace_back(i, j, -wij);
        hess_entries.emplace_back(j, i, -wij);
      }
    }
    grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= grad_tol) return -objective(phi);

    for (int i = 0; i < n; ++i) hess_entries.emplace_back(i, i, hess_diag[i]);
    Eigen::SparseMatrix<double> hess(n, n);
    hess.setFromTriplets(hess_entries.begin(), hess_entries.end());

    // Gauge: drop row/column 0. A tiny ridge keeps the factorization stable
    // when some weights vanish.
    Eigen::SparseMatrix<double> reduced = hess.block(1, 1, n - 1, n - 1);
    const double ridge = 1e-14 * (1.0 + hess_diag.maxCoeff());
    for (int i = 0; i < n - 1; ++i) reduced.coeffRef(i, i) += ridge;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(reduced);
    Eigen::VectorXd step;
    if (solver.info() == Eigen::Success) {
      const Eigen::VectorXd rhs = -grad.tail(n - 1);
      const Eigen::VectorXd sol = solver.solve(rhs);
      step = Eigen::VectorXd::Zero(n);
      step.tail(n - 1) = sol;
    } else {
      step = -grad;  // gradient fallback
      step[0] = 0.0;
    }

    // Armijo backtracking. Once the Newton decrement falls below rounding the
    // objective cannot improve further in double precision; the value error is
    // then O(grad^2 / lambda_min), far below every downstream tolerance.
    const double f0 = objective(phi);
    const double slope = grad.dot(step);
    if (slope > -1e-15 * (1.0 + std::abs(f0))) {
      if (grad_norm <= 1e-6) return -f0;
      break;
    }
    double t = 1.0;
    bool moved = false;
    while (t >= 1e-12) {
      const Eigen::VectorXd trial = phi + t * step;
      if (objective(trial) <= f0 + 1e-4 * t * slope) {
        phi = trial;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      if (grad_norm <= 1e-6) return -f0;
      break;
    }
  }
  char msg[160];
  std::snprintf(msg, sizeof(msg),
                "dv_rate_discrete: no convergence (gradient sup-norm %.3e, tolerance %.1e)",
                grad_norm, grad_tol);
  throw NumericalError(msg);
}

EigenResult principal_eigenvalue(const GridGenerator& g, const Eigen::VectorXd& v_observable) {
  const int n = g.size();
  if (v_observable.size() != n)
    throw std::invalid_argument("principal_eigenvalue: observable size mismatch");
  const auto& q = g.matrix();

  // Nonnegative iteration matrix M = I + h (Q + diag(V) - c I).
  const double shift = v_observable.maxCoeff();
  double max_abs_diag = 0.0;
  for (int i = 0; i < n; ++i)
    max_abs_diag = std::max(max_abs_diag, std::abs(q.coeff(i, i) + v_observable[i] - shift));
  const double h = 0.5 / max_abs_diag;

  auto apply = [&](const Eigen::VectorXd& x, bool transpose) {
    Eigen::VectorXd y = transpose ? Eigen::VectorXd(q.transpose() * x) : Eigen::VectorXd(q * x);
    y += v_observable.cwiseProduct(x) - shift * x;
    return Eigen::VectorXd(x + h * y);
  };

  const int max_iterations = 2000000;
  const double residual_tol = 1e-11;
  EigenResult result;
  Eigen::VectorXd r = Eigen::VectorXd::Ones(n);
  double theta = 1.0;
  double prev_theta = 0.0;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    Eigen::VectorXd next = apply(r, false);
    theta = next.maxCoeff();
    r = next / theta;
    if (std::abs(theta - prev_theta) <= 1e-12 * std::abs(theta)) {
      // Candidate eigenvalue settled; accept once the generator residual is in
      // tolerance.
      const double beta = shift + (theta - 1.0) / h;
      Eigen::VectorXd res = q * r + v_observable.cwiseProduct(r) - beta * r;
      const double rnorm = res.lpNorm<Eigen::Infinity>() / r.lpNorm<Eigen::Infinity>();
      if (rnorm <= residual_tol) break;
    }
    prev_theta = theta;
  }
  if (iter >= max_iterations)
    throw NumericalError("principal_eigenvalue: power iteration did not converge");

  result.beta = shift + (theta - 1.0) / h;
  result.right = r / r.lpNorm<Eigen::Infinity>();

  Eigen::VectorXd l = Eigen::VectorXd::Ones(n);
  for (int it2 = 0; it2 < max_iterations; ++it2) {
    Eigen::VectorXd next = apply(l, true);
    const double scale = next.maxCoeff();
    l = next / scale;
    if (it2 % 16 == 15) {
      Eigen::VectorXd res = q.transpose() * l + v_observable.cwiseProduct(l) - result.beta * l;
      if (res.lpNorm<Eigen::Infinity>() <= residual_tol * l.lpNorm<Eigen::Infinity>()) break;
    }
  }
  result.left = l / l.dot(result.right);

  result.iterations = iter + 1;
  Eigen::VectorXd res = q * result.right + v_observable.cwiseProduct(result.right) -
                        result.beta * result.right;
  result.residual = res.lpNorm<Eigen::Infinity>() / result.right.lpNorm<Eigen::Infinity>();
  if (result.right.minCoeff() <= 0.0 || result.left.minCoeff() <= 0.0)
    throw NumericalError("principal_eigenvalue: Perron vectors not strictly positive");
  return result;
}

double duality_check(const GridGenerator& g, const Eigen::VectorXd& v_observable) {
  const EigenResult eig = principal_eigenvalue(g, v_observable);
  Eigen::VectorXd mu = eig.left.cwiseProduct(eig.right);
  mu /= mu.sum();
  const double pairing = mu.dot(v_observable);
  const double dv = dv_rate_discrete(g, mu);
  return std::abs(eig.beta - (pairing - dv));
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.1 * i);
  return grid;
}

double legendre_rate(const GridGenerator& g, const Eigen::VectorXd& v_observable, double level,
                     std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw std::invalid_argument("legendre_rate: empty theta grid");
  auto value_at = [&](double theta) {
    return theta * level - principal_eigenvalue(g, theta * v_observable).beta;
  };
  std::vector<double> values;
  values.reserve(theta_grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    values.push_back(value_at(theta_grid[i]));
    if (values[i] > values[best]) best = i;
  }
  // Golden-section refinement on the bracket around the grid argmax.
  double lo = theta_grid[best > 0 ? best - 1 : best];
  double hi = theta_grid[best + 1 < theta_grid.size() ? best + 1 : best];
  if (lo == hi) return values[best];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = value_at(c), fd = value_at(d);
  for (int it = 0; it < 40 && (b - a) > 1e-4; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value_at(d);
    }
  }
  return std::max({values[best], fc, fd});
}

Eigen::VectorXd discrete_stationary(const GridGenerator& g) {
  const EigenResult eig = principal_eigenvalue(g, Eigen::VectorXd::Zero(g.size()));
  Eigen::VectorXd pi = eig.left;
  return pi / pi.sum();
}

}  // namespace zigzag
