#ifndef ZIGZAG_HARNESS_HPP
#define ZIGZAG_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "zigzag/empirical.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/ratefn.hpp"
#include "zigzag/sampler.hpp"

namespace zigzag {

// Ensemble experiment description. Trajectories are keyed by (seed, stream)
// so results are independent of thread count; reductions run in fixed index
// order.
struct ExperimentPlan {
  Potential potential = Potential::zero();
  double gamma = 1.0;
  Observable observable{[](double, int) { return 0.0; }, false};
  std::vector<double> horizons;  // increasing
  int ensemble = 1;
  std::uint64_t seed = 0;
  int grid_cells = 256;
  State initial{0.0, +1};
  double thinning_horizon = 0.0;  // 0 = sampler default
  int threads = 0;                // 0 = hardware concurrency
};

// Run fn(i) for i in [0, n) on the requested number of threads.
void parallel_for_index(int n, int threads, const std::function<void(int)>& fn);

struct ScgfResult {
  double estimate = 0.0;       // (1/t) log mean exp(t eta_t(V))
  double standard_error = 0.0;
  double ess = 0.0;            // effective sample size of the exponential weights
  bool ess_warning = false;    // ess < 0.01 * ensemble
  double horizon = 0.0;
  int ensemble = 0;
};

// Monte Carlo estimate of the scaled cumulant generating function at the last
// plan horizon, with a delta-method standard error. Log-mean-exp is centered
// by the maximum path integral.
ScgfResult scgf_mc(const ExperimentPlan& plan);

struct DecayPoint {
  double horizon = 0.0;
  std::uint64_t hits = 0;
  double probability = 0.0;
  bool censored = false;  // zero hits; excluded from the fit
};

struct DecayResult {
  std::vector<DecayPoint> points;
  double slope = 0.0;
  double slope_standard_error = 0.0;
  double ci_half_width = 0.0;  // 1.96 * standard error
  int fit_points = 0;
  bool fit_valid = false;      // at least two uncensored horizons
};

// Tail probabilities P(eta_t(V) >= level) per horizon and the least-squares
// slope of log p against t.
DecayResult ldp_decay(const ExperimentPlan& plan, double level);

struct GammaSweepRow {
  double gamma = 0.0;
  double value = 0.0;
};

struct GammaSweepResult {
  std::vector<GammaSweepRow> rows;
  std::vector<double> derivative_check;  // gamma_derivative integral per gamma
  bool strictly_decreasing = false;
  int violation_index = -1;  // first offending pair, -1 if none
};

// rate_w_form across a gamma grid; flags any monotonicity violation
// (test-failure status for the CLI, not an exception).
GammaSweepResult gamma_sweep(const WForm& w, const Potential& potential,
                             std::span<const double> gammas);

struct DvCompareRow {
  int n_cells = 0;
  double dv_value = 0.0;
  double explicit_value = 0.0;
  double abs_error = 0.0;
  double error_ratio = 0.0;  // vs previous row; 0 for the first
};

// Variational-vs-explicit convergence table over grid resolutions. The
// density is given as closures so each resolution rebuilds its own grid
// objects.
std::vector<DvCompareRow> dv_compare(const ScalarFn& rho, const ScalarFn& drho,
                                     const Potential& potential, double gamma,
                                     std::span<const int> resolutions);

// Ensemble histogram: merged empirical measure over `ensemble` trajectories
// of the last plan horizon.
EmpiricalMeasure ensemble_histogram(const ExperimentPlan& plan);

}  // namespace zigzag

#endif
