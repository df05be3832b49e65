// Configuration-driven command line for the zig-zag large-deviations toolkit.
// Every subcommand reads a JSON config, writes CSV/JSON artifacts into the
// output directory and prints a one-line JSON verdict on stdout.
//
// Exit codes: 0 success, 1 config/schema error, 2 numerical failure,
// 3 test-failure status from harness assertions.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "zigzag/empirical.hpp"
#include "zigzag/errors.hpp"
#include "zigzag/harness.hpp"
#include "zigzag/io.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/ratefn.hpp"
#include "zigzag/sampler.hpp"
#include "zigzag/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zigzag;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// --- schema helpers -------------------------------------------------------

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
  return *it;
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError("key \"" + std::string(key) + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("key \"") + key + "\" must be a number");
  return it->get<double>();
}

// --- sub-schemas ----------------------------------------------------------

Potential parse_potential(const json& spec) {
  if (!spec.is_object()) throw ConfigError("potential spec must be an object");
  const std::string kind = require(spec, "kind", "potential").get<std::string>();
  if (kind == "zero") {
    reject_unknown_keys(spec, {"kind"}, "potential");
    return Potential::zero();
  }
  if (kind == "cosine") {
    reject_unknown_keys(spec, {"kind", "amplitude", "frequency", "phase"}, "potential");
    return Potential::cosine(require_number(spec, "amplitude", "potential"),
                             static_cast<int>(number_or(spec, "frequency", 1)),
                             number_or(spec, "phase", 0.0));
  }
  if (kind == "quadratic") {
    reject_unknown_keys(spec, {"kind", "scale"}, "potential");
    return Potential::quadratic(require_number(spec, "scale", "potential"));
  }
  if (kind == "power") {
    reject_unknown_keys(spec, {"kind", "exponent"}, "potential");
    return Potential::power(require_number(spec, "exponent", "potential"));
  }
  if (kind == "tabulated") {
    reject_unknown_keys(spec, {"kind", "values"}, "potential");
    const json& values = require(spec, "values", "potential");
    if (!values.is_array()) throw ConfigError("key \"values\" must be an array");
    return Potential::tabulated(values.get<std::vector<double>>());
  }
  throw ConfigError("unknown potential kind \"" + kind + "\"");
}

Observable parse_observable(const json& spec) {
  if (!spec.is_object()) throw ConfigError("observable spec must be an object");
  const std::string kind = require(spec, "kind", "observable").get<std::string>();
  if (kind == "zero") {
    reject_unknown_keys(spec, {"kind"}, "observable");
    return {[](double, int) { return 0.0; }, false};
  }
  if (kind == "constant") {
    reject_unknown_keys(spec, {"kind", "value"}, "observable");
    const double c = require_number(spec, "value", "observable");
    return {[c](double, int) { return c; }, false};
  }
  if (kind == "cosine") {
    reject_unknown_keys(spec, {"kind", "amplitude", "frequency", "phase"}, "observable");
    const double a = require_number(spec, "amplitude", "observable");
    const double k = number_or(spec, "frequency", 1);
    const double p = number_or(spec, "phase", 0.0);
    return {[a, k, p](double x, int) { return a * std::cos(two_pi * k * x + p); }, false};
  }
  if (kind == "velocity") {
    reject_unknown_keys(spec, {"kind"}, "observable");
    return {[](double, int v) { return static_cast<double>(v); }, true};
  }
  throw ConfigError("unknown observable kind \"" + kind + "\"");
}

struct DensitySpec {
  // closures valid where the kind admits them (everything except "constants")
  ScalarFn rho, drho;
  bool has_closures = false;
  double rho_plus = 0.0, rho_minus = 0.0;  // for "constants"
  bool is_constants = false;
};

DensitySpec parse_density(const json& spec, const Potential& potential, int grid) {
  if (!spec.is_object()) throw ConfigError("density spec must be an object");
  const std::string kind = require(spec, "kind", "density").get<std::string>();
  DensitySpec out;
  if (kind == "stationary") {
    reject_unknown_keys(spec, {"kind"}, "density");
    // Normalization constant from the grid quadrature used everywhere else.
    const std::vector<double> dens = stationary_density(potential, grid);
    double z = 0.0;
    for (int i = 0; i < grid; ++i)
      z += std::exp(-potential.value((i + 0.5) / grid));
    z /= grid;
    Potential pot = potential;
    out.rho = [pot, z](double x) { return std::exp(-pot.value(x)) / z; };
    out.drho = [pot, z](double x) { return -pot.deriv(x) * std::exp(-pot.value(x)) / z; };
    out.has_closures = true;
    return out;
  }
  if (kind == "uniform") {
    reject_unknown_keys(spec, {"kind"}, "density");
    out.rho = [](double) { return 1.0; };
    out.drho = [](double) { return 0.0; };
    out.has_closures = true;
    return out;
  }
  if (kind == "fourier") {
    reject_unknown_keys(spec, {"kind", "terms"}, "density");
    const json& terms = require(spec, "terms", "density");
    if (!terms.is_array() || terms.empty()) throw ConfigError("key \"terms\" must be a nonempty array");
    std::vector<std::array<double, 3>> coef;  // {k, sin, cos}
    for (const json& t : terms) {
      reject_unknown_keys(t, {"frequency", "sin", "cos"}, "density term");
      coef.push_back({require_number(t, "frequency", "density term"), number_or(t, "sin", 0.0),
                      number_or(t, "cos", 0.0)});
    }
    out.rho = [coef](double x) {
      double r = 1.0;
      for (const auto& c : coef)
        r += c[1] * std::sin(two_pi * c[0] * x) + c[2] * std::cos(two_pi * c[0] * x);
      return r;
    };
    out.drho = [coef](double x) {
      double r = 0.0;
      for (const auto& c : coef)
        r += two_pi * c[0] *
             (c[1] * std::cos(two_pi * c[0] * x) - c[2] * std::sin(two_pi * c[0] * x));
      return r;
    };
    out.has_closures = true;
    return out;
  }
  if (kind == "constants") {
    reject_unknown_keys(spec, {"kind", "rho_plus", "rho_minus"}, "density");
    out.rho_plus = require_number(spec, "rho_plus", "density");
    out.rho_minus = require_number(spec, "rho_minus", "density");
    out.is_constants = true;
    return out;
  }
  throw ConfigError("unknown density kind \"" + kind + "\"");
}

DensityPair density_pair_from_spec(const DensitySpec& spec, int grid) {
  if (spec.is_constants) {
    const double rp = spec.rho_plus, rm = spec.rho_minus;
    return DensityPair::from_functions(
        grid, [rp](double) { return rp; }, [](double) { return 0.0; },
        [rm](double) { return rm; }, [](double) { return 0.0; });
  }
  return DensityPair::from_function(grid, spec.rho, spec.drho);
}

// --- run context ----------------------------------------------------------

struct RunContext {
  json config;
  std::string config_text;
  Potential potential = Potential::zero();
  double gamma = 1.0;
  int grid = 256;
  std::uint64_t seed = 0;
  int threads = 0;
  fs::path out_dir;

  std::uint64_t inputs_hash() const { return fnv1a_hash(config_text); }
};

RunContext load_context(const std::string& config_path, const std::string& out_override,
                        bool seed_overridden, std::uint64_t seed_value, int threads_override,
                        const char* block_key) {
  RunContext ctx;
  ctx.config_text = read_text_file(config_path);
  try {
    ctx.config = json::parse(ctx.config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  reject_unknown_keys(ctx.config,
                      {"domain", "potential", "gamma", "grid", "seed", "threads", "output",
                       block_key},
                      "config");
  const std::string domain = ctx.config.value("domain", std::string("torus"));
  if (domain != "torus" && domain != "line")
    throw ConfigError("key \"domain\" must be \"torus\" or \"line\"");
  ctx.potential = parse_potential(require(ctx.config, "potential", "config"));
  ctx.gamma = number_or(ctx.config, "gamma", 1.0);
  if (ctx.gamma < 0.0) throw ConfigError("key \"gamma\" must be nonnegative");
  const double grid = number_or(ctx.config, "grid", 256);
  if (grid < 2 || grid != std::floor(grid)) throw ConfigError("key \"grid\" must be an integer >= 2");
  ctx.grid = static_cast<int>(grid);
  ctx.seed = seed_overridden ? seed_value
                             : static_cast<std::uint64_t>(number_or(ctx.config, "seed", 0));
  ctx.threads = threads_override >= 0 ? threads_override
                                      : static_cast<int>(number_or(ctx.config, "threads", 0));
  std::string out = out_override.empty() ? ctx.config.value("output", std::string("out"))
                                         : out_override;
  ctx.out_dir = out;
  fs::create_directories(ctx.out_dir);
  return ctx;
}

const json& experiment_block(const RunContext& ctx, const char* key) {
  return require(ctx.config, key, "config");
}

json base_summary(const RunContext& ctx) {
  json s;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(ctx.inputs_hash()));
  s["inputs_hash"] = buf;
  s["seed"] = ctx.seed;
  return s;
}

void emit(const RunContext& ctx, json summary) {
  write_text_file((ctx.out_dir / "summary.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
}

// --- subcommands ----------------------------------------------------------

int cmd_simulate(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "simulate");
  reject_unknown_keys(block, {"t_max", "x0", "v0", "thinning_horizon", "trajectories"},
                      "simulate");
  SimConfig cfg;
  cfg.t_max = require_number(block, "t_max", "simulate");
  cfg.seed = ctx.seed;
  cfg.thinning_horizon = number_or(block, "thinning_horizon", 0.0);
  const int trajectories = static_cast<int>(number_or(block, "trajectories", 1));
  if (trajectories < 1) throw ConfigError("key \"trajectories\" must be >= 1");
  State s0{number_or(block, "x0", 0.0), static_cast<int>(number_or(block, "v0", 1))};
  const SwitchingRate rate(ctx.potential, ctx.gamma);

  json summary = base_summary(ctx);
  json traj_list = json::array();
  for (int k = 0; k < trajectories; ++k) {
    const Skeleton sk = simulate(rate, s0, cfg, static_cast<std::uint64_t>(k));
    std::ostringstream csv;
    csv << "t,x,v\n";
    csv << fmt_double(0.0) << "," << fmt_double(sk.initial.x) << "," << sk.initial.v << "\n";
    for (const SkeletonEvent& e : sk.events)
      csv << fmt_double(e.t) << "," << fmt_double(e.x) << "," << e.v << "\n";
    const State last = position_at(sk, sk.t_final);
    csv << fmt_double(sk.t_final) << "," << fmt_double(last.x) << "," << last.v << "\n";
    char name[64];
    std::snprintf(name, sizeof(name), "trajectory_%03d.csv", k);
    write_text_file((ctx.out_dir / name).string(), csv.str());

    json meta;
    meta["seed"] = sk.seed;
    meta["stream"] = sk.stream;
    meta["proposals"] = sk.proposals;
    meta["acceptances"] = sk.acceptances;
    meta["t_max"] = sk.t_final;
    std::snprintf(name, sizeof(name), "trajectory_%03d.json", k);
    write_text_file((ctx.out_dir / name).string(), meta.dump(2) + "\n");
    traj_list.push_back({{"events", sk.events.size()},
                         {"proposals", sk.proposals},
                         {"acceptances", sk.acceptances}});
  }
  summary["verdict"] = "ok";
  summary["trajectories"] = traj_list;
  emit(ctx, summary);
  return 0;
}

int cmd_histogram(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "histogram");
  reject_unknown_keys(block, {"t_max", "cells", "trajectories", "x0", "v0", "thinning_horizon"},
                      "histogram");
  ExperimentPlan plan;
  plan.potential = ctx.potential;
  plan.gamma = ctx.gamma;
  plan.horizons = {require_number(block, "t_max", "histogram")};
  plan.ensemble = static_cast<int>(number_or(block, "trajectories", 1));
  plan.seed = ctx.seed;
  plan.grid_cells = static_cast<int>(number_or(block, "cells", 64));
  plan.initial = State{number_or(block, "x0", 0.0), static_cast<int>(number_or(block, "v0", 1))};
  plan.thinning_horizon = number_or(block, "thinning_horizon", 0.0);
  plan.threads = ctx.threads;

  const EmpiricalMeasure m = ensemble_histogram(plan);
  std::ostringstream csv;
  csv << "cell,x_center,occ_plus,occ_minus,p_plus,p_minus\n";
  for (int i = 0; i < m.n_cells(); ++i) {
    csv << i << "," << fmt_double((i + 0.5) / m.n_cells()) << ","
        << fmt_double(m.occupancy(i, +1)) << "," << fmt_double(m.occupancy(i, -1)) << ","
        << fmt_double(m.probability(i, +1)) << "," << fmt_double(m.probability(i, -1)) << "\n";
  }
  write_text_file((ctx.out_dir / "histogram.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["t_total"] = m.t_total();
  summary["velocity_fraction_plus"] = m.velocity_fraction(+1);
  if (ctx.potential.torus_compatible()) {
    const std::vector<double> target = stationary_density(ctx.potential, m.n_cells());
    summary["tv_to_stationary"] = tv_distance(m, target);
  }
  summary["verdict"] = "ok";
  emit(ctx, summary);
  return 0;
}

int cmd_rate_eval(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "rate-eval");
  reject_unknown_keys(block, {"density", "velocity_offset"}, "rate-eval");
  const DensitySpec spec = parse_density(require(block, "density", "rate-eval"), ctx.potential,
                                          ctx.grid);
  DensityPair d = density_pair_from_spec(spec, ctx.grid);
  const double offset = number_or(block, "velocity_offset", 0.0);
  if (offset != 0.0) d = d.velocity_offset(offset);
  const SwitchingRate rate(ctx.potential, ctx.gamma);
  const RateReport report = rate_explicit(d, rate);

  std::ostringstream csv;
  csv << "x,integrand,lambda_plus,lambda_minus,rho_plus,rho_minus,eta_star\n";
  std::vector<double> tilt;
  if (report.branch == RateBranch::general) tilt = optimal_tilt(d, rate);
  for (int i = 0; i < d.n_cells; ++i) {
    const double x = (i + 0.5) / d.n_cells;
    csv << fmt_double(x) << ","
        << fmt_double(report.integrand.empty() ? kInfiniteRate : report.integrand[i]) << ","
        << fmt_double(rate.lambda_plus(x)) << "," << fmt_double(rate.lambda_minus(x)) << ","
        << fmt_double(d.rho_plus[i]) << "," << fmt_double(d.rho_minus[i]) << ","
        << fmt_double(tilt.empty() ? 0.0 : tilt[i]) << "\n";
  }
  write_text_file((ctx.out_dir / "rate_cells.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["value"] = report.is_infinite() ? json("inf") : json(report.value);
  summary["branch"] = to_string(report.branch);
  summary["N"] = report.n_cells;
  summary["gamma"] = ctx.gamma;
  summary["verdict"] = "ok";
  write_text_file((ctx.out_dir / "rate_summary.json").string(), summary.dump(2) + "\n");
  emit(ctx, summary);
  return 0;
}

int cmd_gamma_sweep(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "gamma-sweep");
  reject_unknown_keys(block, {"density", "gammas"}, "gamma-sweep");
  const DensitySpec spec = parse_density(require(block, "density", "gamma-sweep"),
                                          ctx.potential, ctx.grid);
  if (!spec.has_closures)
    throw ConfigError("gamma-sweep requires a density kind with a common density (not \"constants\")");
  const json& gammas_json = require(block, "gammas", "gamma-sweep");
  if (!gammas_json.is_array()) throw ConfigError("key \"gammas\" must be an array");
  const std::vector<double> gammas = gammas_json.get<std::vector<double>>();

  const DensityPair d = DensityPair::from_function(ctx.grid, spec.rho, spec.drho);
  const WForm w = WForm::from_density(d);
  const GammaSweepResult result = gamma_sweep(w, ctx.potential, gammas);

  std::ostringstream csv;
  csv << "gamma,value,derivative_integral\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i)
    csv << fmt_double(result.rows[i].gamma) << "," << fmt_double(result.rows[i].value) << ","
        << fmt_double(result.derivative_check[i]) << "\n";
  write_text_file((ctx.out_dir / "gamma_sweep.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["strictly_decreasing"] = result.strictly_decreasing;
  summary["verdict"] = result.strictly_decreasing ? "ok" : "monotonicity-violation";
  if (!result.strictly_decreasing) summary["violation_index"] = result.violation_index;
  emit(ctx, summary);
  return result.strictly_decreasing ? 0 : 3;
}

int cmd_dv_compare(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "dv-compare");
  reject_unknown_keys(block, {"density", "resolutions"}, "dv-compare");
  const DensitySpec spec = parse_density(require(block, "density", "dv-compare"),
                                          ctx.potential, ctx.grid);
  if (!spec.has_closures)
    throw ConfigError("dv-compare requires a density kind with closures (not \"constants\")");
  const json& res_json = require(block, "resolutions", "dv-compare");
  if (!res_json.is_array()) throw ConfigError("key \"resolutions\" must be an array");
  std::vector<int> resolutions;
  for (const json& r : res_json) resolutions.push_back(r.get<int>());

  const std::vector<DvCompareRow> rows =
      dv_compare(spec.rho, spec.drho, ctx.potential, ctx.gamma, resolutions);
  std::ostringstream csv;
  csv << "N,dv,explicit,abs_error,ratio\n";
  for (const DvCompareRow& r : rows)
    csv << r.n_cells << "," << fmt_double(r.dv_value) << "," << fmt_double(r.explicit_value)
        << "," << fmt_double(r.abs_error) << "," << fmt_double(r.error_ratio) << "\n";
  write_text_file((ctx.out_dir / "dv_compare.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["rows"] = rows.size();
  summary["final_abs_error"] = rows.empty() ? 0.0 : rows.back().abs_error;
  summary["verdict"] = "ok";
  emit(ctx, summary);
  return 0;
}

int cmd_eigen(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "eigen");
  reject_unknown_keys(block, {"observable", "duality", "dump_matrix"}, "eigen");
  const Observable obs = parse_observable(require(block, "observable", "eigen"));
  const SwitchingRate rate(ctx.potential, ctx.gamma);
  const GridGenerator g(rate, ctx.grid);
  const Eigen::VectorXd v = grid_observable(g, obs.f);
  const EigenResult eig = principal_eigenvalue(g, v);

  std::ostringstream csv;
  csv << "beta,iterations,residual\n";
  csv << fmt_double(eig.beta) << "," << eig.iterations << "," << fmt_double(eig.residual) << "\n";
  write_text_file((ctx.out_dir / "eigen.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["beta"] = eig.beta;
  summary["iterations"] = eig.iterations;
  summary["residual"] = eig.residual;
  if (block.value("duality", false)) {
    const double gap = duality_check(g, v);
    std::ostringstream dual;
    dual << "beta,duality_gap\n" << fmt_double(eig.beta) << "," << fmt_double(gap) << "\n";
    write_text_file((ctx.out_dir / "duality.csv").string(), dual.str());
    summary["duality_gap"] = gap;
  }
  if (block.value("dump_matrix", false)) {
    std::ostringstream dump;
    dump << "row,col,value\n";
    const auto& q = g.matrix();
    for (int row = 0; row < g.size(); ++row)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, row); it; ++it)
        dump << row << "," << it.col() << "," << fmt_double(it.value()) << "\n";
    write_text_file((ctx.out_dir / "generator.csv").string(), dump.str());
  }
  summary["verdict"] = "ok";
  emit(ctx, summary);
  return 0;
}

int cmd_scgf(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "scgf");
  reject_unknown_keys(block, {"observable", "t", "ensemble", "x0", "v0", "thinning_horizon"},
                      "scgf");
  ExperimentPlan plan;
  plan.potential = ctx.potential;
  plan.gamma = ctx.gamma;
  plan.observable = parse_observable(require(block, "observable", "scgf"));
  plan.horizons = {require_number(block, "t", "scgf")};
  plan.ensemble = static_cast<int>(number_or(block, "ensemble", 1000));
  plan.seed = ctx.seed;
  plan.grid_cells = ctx.grid;
  plan.initial = State{number_or(block, "x0", 0.0), static_cast<int>(number_or(block, "v0", 1))};
  plan.thinning_horizon = number_or(block, "thinning_horizon", 0.0);
  plan.threads = ctx.threads;

  const ScgfResult result = scgf_mc(plan);
  const SwitchingRate rate(ctx.potential, ctx.gamma);
  const GridGenerator g(rate, ctx.grid);
  const double beta = principal_eigenvalue(g, grid_observable(g, plan.observable.f)).beta;

  std::ostringstream csv;
  csv << "t,ensemble,estimate,stderr,ess,beta_spectral\n";
  csv << fmt_double(result.horizon) << "," << result.ensemble << ","
      << fmt_double(result.estimate) << "," << fmt_double(result.standard_error) << ","
      << fmt_double(result.ess) << "," << fmt_double(beta) << "\n";
  write_text_file((ctx.out_dir / "scgf.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["estimate"] = result.estimate;
  summary["standard_error"] = result.standard_error;
  summary["ess"] = result.ess;
  summary["beta_spectral"] = beta;
  summary["verdict"] = result.ess_warning ? "ok-ess-warning" : "ok";
  emit(ctx, summary);
  return 0;
}

int cmd_ldp_decay(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "ldp-decay");
  reject_unknown_keys(block,
                      {"observable", "level", "level_above_mean", "horizons", "ensemble", "x0",
                       "v0", "thinning_horizon"},
                      "ldp-decay");
  ExperimentPlan plan;
  plan.potential = ctx.potential;
  plan.gamma = ctx.gamma;
  plan.observable = parse_observable(require(block, "observable", "ldp-decay"));
  const json& horizons_json = require(block, "horizons", "ldp-decay");
  if (!horizons_json.is_array()) throw ConfigError("key \"horizons\" must be an array");
  plan.horizons = horizons_json.get<std::vector<double>>();
  plan.ensemble = static_cast<int>(number_or(block, "ensemble", 1000));
  plan.seed = ctx.seed;
  plan.grid_cells = ctx.grid;
  plan.initial = State{number_or(block, "x0", 0.0), static_cast<int>(number_or(block, "v0", 1))};
  plan.thinning_horizon = number_or(block, "thinning_horizon", 0.0);
  plan.threads = ctx.threads;

  const SwitchingRate rate(ctx.potential, ctx.gamma);
  const GridGenerator g(rate, ctx.grid);
  const Eigen::VectorXd v = grid_observable(g, plan.observable.f);

  double level;
  const bool has_abs = block.contains("level");
  const bool has_rel = block.contains("level_above_mean");
  if (has_abs == has_rel)
    throw ConfigError("ldp-decay needs exactly one of \"level\", \"level_above_mean\"");
  if (has_abs) {
    level = require_number(block, "level", "ldp-decay");
  } else {
    const Eigen::VectorXd pi = discrete_stationary(g);
    level = pi.dot(v) + require_number(block, "level_above_mean", "ldp-decay");
  }

  const DecayResult result = ldp_decay(plan, level);
  const std::vector<double> thetas = default_theta_grid();
  const double legendre = legendre_rate(g, v, level, thetas);

  std::ostringstream csv;
  csv << "t,hits,p,log_p,censored\n";
  for (const DecayPoint& p : result.points)
    csv << fmt_double(p.horizon) << "," << p.hits << "," << fmt_double(p.probability) << ","
        << (p.censored ? "" : fmt_double(std::log(p.probability))) << ","
        << (p.censored ? 1 : 0) << "\n";
  write_text_file((ctx.out_dir / "ldp_decay.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["level"] = level;
  summary["fit_valid"] = result.fit_valid;
  summary["fit_points"] = result.fit_points;
  if (result.fit_valid) {
    summary["slope"] = result.slope;
    summary["slope_stderr"] = result.slope_standard_error;
    summary["ci_half_width"] = result.ci_half_width;
  }
  summary["legendre_rate"] = legendre;
  summary["verdict"] = result.fit_valid ? "ok" : "censored";
  emit(ctx, summary);
  return 0;
}

int cmd_check_conditions(const RunContext& ctx) {
  const json& block = experiment_block(ctx, "check-conditions");
  reject_unknown_keys(block, {"aux_potential", "radii"}, "check-conditions");
  const Potential aux = parse_potential(require(block, "aux_potential", "check-conditions"));
  const json& radii_json = require(block, "radii", "check-conditions");
  if (!radii_json.is_array()) throw ConfigError("key \"radii\" must be an array");
  const std::vector<double> radii = radii_json.get<std::vector<double>>();

  const GrowthReport report = check_growth_conditions(ctx.potential, aux, radii);
  std::ostringstream csv;
  csv << "condition,description,radius,value_pos,value_neg,trending_pass\n";
  for (const GrowthRatio& g : report.ratios)
    for (std::size_t i = 0; i < g.radii.size(); ++i)
      csv << g.condition << "," << g.description << "," << fmt_double(g.radii[i]) << ","
          << fmt_double(g.values_pos[i]) << "," << fmt_double(g.values_neg[i]) << ","
          << (g.trending_pass ? 1 : 0) << "\n";
  write_text_file((ctx.out_dir / "growth_conditions.csv").string(), csv.str());

  json summary = base_summary(ctx);
  summary["all_pass"] = report.all_pass;
  summary["note"] = report.note;
  json conds = json::array();
  for (const GrowthRatio& g : report.ratios)
    conds.push_back({{"condition", g.condition}, {"pass", g.trending_pass}});
  summary["conditions"] = conds;
  summary["verdict"] = "ok";
  emit(ctx, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zig-zag empirical-measure large deviations toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed_value = 0;
  int threads_override = -1;
  bool seed_overridden = false;

  const std::vector<std::pair<std::string, int (*)(const RunContext&)>> commands = {
      {"simulate", cmd_simulate},           {"histogram", cmd_histogram},
      {"rate-eval", cmd_rate_eval},         {"gamma-sweep", cmd_gamma_sweep},
      {"dv-compare", cmd_dv_compare},       {"eigen", cmd_eigen},
      {"scgf", cmd_scgf},                   {"ldp-decay", cmd_ldp_decay},
      {"check-conditions", cmd_check_conditions}};

  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed_value, "seed override")->each([&](const std::string&) {
      seed_overridden = true;
    });
    sub->add_option("--threads", threads_override, "worker threads (0 = auto)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  int (*fn)(const RunContext&) = nullptr;
  for (const auto& [n, f] : commands)
    if (n == name) fn = f;

  try {
    const RunContext ctx = load_context(config_path, out_dir, seed_overridden, seed_value,
                                        threads_override, name.c_str());
    return fn(ctx);
  } catch (const ConfigError& e) {
    std::cout << json{{"verdict", "config-error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cout << json{{"verdict", "config-error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cout << json{{"verdict", "config-error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cout << json{{"verdict", "numerical-failure"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << json{{"verdict", "error"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
