#include "zigzag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "zigzag/errors.hpp"
#include "zigzag/spectral.hpp"

namespace zigzag {

void parallel_for_index(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

SimConfig plan_sim_config(const ExperimentPlan& plan, double horizon) {
  SimConfig cfg;
  cfg.t_max = horizon;
  cfg.seed = plan.seed;
  cfg.thinning_horizon = plan.thinning_horizon;
  cfg.domain = DomainKind::torus;
  return cfg;
}

void check_plan(const ExperimentPlan& plan) {
  if (plan.ensemble < 1) throw ConfigError("experiment: ensemble size must be >= 1");
  if (plan.horizons.empty()) throw ConfigError("experiment: need at least one horizon");
  if (!std::is_sorted(plan.horizons.begin(), plan.horizons.end()))
    throw ConfigError("experiment: horizons must be increasing");
  if (plan.horizons.front() <= 0.0) throw ConfigError("experiment: horizons must be positive");
  if (!observable_bounded(plan.observable))
    throw ConfigError("experiment: observable is unbounded on the torus grid scan");
}

}  // namespace

ScgfResult scgf_mc(const ExperimentPlan& plan) {
  check_plan(plan);
  const double t = plan.horizons.back();
  const int m = plan.ensemble;
  const SwitchingRate rate(plan.potential, plan.gamma);
  const SimConfig cfg = plan_sim_config(plan, t);

  std::vector<double> path_integrals(m);
  parallel_for_index(m, plan.threads, [&](int i) {
    const Skeleton sk = simulate(rate, plan.initial, cfg, static_cast<std::uint64_t>(i));
    path_integrals[i] = path_integral(sk, plan.observable);
  });

  // log-mean-exp centered by the maximum, then a delta-method standard error
  // for (1/t) log wbar.
  const double center = *std::max_element(path_integrals.begin(), path_integrals.end());
  double sum_w = 0.0, sum_w2 = 0.0;
  for (double a : path_integrals) {
    const double w = std::exp(a - center);
    sum_w += w;
    sum_w2 += w * w;
  }
  const double mean_w = sum_w / m;
  ScgfResult result;
  result.horizon = t;
  result.ensemble = m;
  result.estimate = (center + std::log(mean_w)) / t;
  double var_w = 0.0;
  for (double a : path_integrals) {
    const double w = std::exp(a - center) - mean_w;
    var_w += w * w;
  }
  var_w /= (m > 1) ? (m - 1) : 1;
  result.standard_error = std::sqrt(var_w / m) / (mean_w * t);
  result.ess = sum_w * sum_w / sum_w2;
  result.ess_warning = result.ess < 0.01 * m;
  return result;
}

DecayResult ldp_decay(const ExperimentPlan& plan, double level) {
  check_plan(plan);
  const SwitchingRate rate(plan.potential, plan.gamma);
  const int m = plan.ensemble;

  DecayResult result;
  for (std::size_t j = 0; j < plan.horizons.size(); ++j) {
    const double t = plan.horizons[j];
    const SimConfig cfg = plan_sim_config(plan, t);
    std::vector<char> hit(m, 0);
    parallel_for_index(m, plan.threads, [&](int i) {
      const std::uint64_t stream = static_cast<std::uint64_t>(j) * m + i;
      const Skeleton sk = simulate(rate, plan.initial, cfg, stream);
      hit[i] = time_average(sk, plan.observable) >= level ? 1 : 0;
    });
    DecayPoint point;
    point.horizon = t;
    for (char h : hit) point.hits += h;
    point.probability = static_cast<double>(point.hits) / m;
    point.censored = point.hits == 0;
    result.points.push_back(point);
  }

  // Least squares of log p against t over uncensored horizons.
  std::vector<double> ts, ys;
  for (const DecayPoint& p : result.points)
    if (!p.censored) {
      ts.push_back(p.horizon);
      ys.push_back(std::log(p.probability));
    }
  result.fit_points = static_cast<int>(ts.size());
  if (result.fit_points < 2) return result;

  const int n = result.fit_points;
  double mean_t = 0.0, mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_t += ts[i];
    mean_y += ys[i];
  }
  mean_t /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (ts[i] - mean_t) * (ts[i] - mean_t);
    sxy += (ts[i] - mean_t) * (ys[i] - mean_y);
  }
  result.slope = sxy / sxx;
  result.fit_valid = true;
  if (n > 2) {
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
      const double fit = mean_y + result.slope * (ts[i] - mean_t);
      ss_res += (ys[i] - fit) * (ys[i] - fit);
    }
    result.slope_standard_error = std::sqrt(ss_res / (n - 2) / sxx);
  }
  result.ci_half_width = 1.96 * result.slope_standard_error;
  return result;
}

GammaSweepResult gamma_sweep(const WForm& w, const Potential& potential,
                             std::span<const double> gammas) {
  if (gammas.empty()) throw ConfigError("gamma_sweep: empty gamma list");
  for (std::size_t i = 0; i + 1 < gammas.size(); ++i)
    if (gammas[i + 1] <= gammas[i]) throw ConfigError("gamma_sweep: gammas must be increasing");
  if (gammas.front() <= 0.0) throw ConfigError("gamma_sweep: gammas must be positive");

  GammaSweepResult result;
  for (double g : gammas) {
    const SwitchingRate rate(potential, g);
    result.rows.push_back({g, rate_w_form(w, rate).value});
    result.derivative_check.push_back(gamma_derivative(w, rate).integral);
  }
  result.strictly_decreasing = true;
  const bool all_zero = std::all_of(result.rows.begin(), result.rows.end(),
                                    [](const GammaSweepRow& r) { return std::abs(r.value) <= 1e-10; });
  if (!all_zero) {
    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
      if (!(result.rows[i].value > result.rows[i + 1].value + 1e-10)) {
        result.strictly_decreasing = false;
        result.violation_index = static_cast<int>(i);
        break;
      }
    }
  }
  return result;
}

std::vector<DvCompareRow> dv_compare(const ScalarFn& rho, const ScalarFn& drho,
                                     const Potential& potential, double gamma,
                                     std::span<const int> resolutions) {
  std::vector<DvCompareRow> rows;
  const SwitchingRate rate(potential, gamma);
  for (int n : resolutions) {
    const DensityPair d = DensityPair::from_function(n, rho, drho);
    const GridGenerator g(rate, n);
    DvCompareRow row;
    row.n_cells = n;
    row.dv_value = dv_rate_discrete(g, pairing_weights(d));
    row.explicit_value = rate_explicit(d, rate).value;
    row.abs_error = std::abs(row.dv_value - row.explicit_value);
    row.error_ratio = rows.empty() ? 0.0 : row.abs_error / rows.back().abs_error;
    rows.push_back(row);
  }
  return rows;
}

EmpiricalMeasure ensemble_histogram(const ExperimentPlan& plan) {
  check_plan(plan);
  const SwitchingRate rate(plan.potential, plan.gamma);
  const SimConfig cfg = plan_sim_config(plan, plan.horizons.back());
  std::vector<EmpiricalMeasure> parts;
  parts.reserve(plan.ensemble);
  for (int i = 0; i < plan.ensemble; ++i) parts.emplace_back(plan.grid_cells);
  parallel_for_index(plan.ensemble, plan.threads, [&](int i) {
    const Skeleton sk = simulate(rate, plan.initial, cfg, static_cast<std::uint64_t>(i));
    parts[i].add(sk);
  });
  EmpiricalMeasure merged(plan.grid_cells);
  for (const EmpiricalMeasure& p : parts) merged.merge(p);  // fixed index order
  return merged;
}

}  // namespace zigzag
