// riskfix command-line entry point.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskfix/errors.hpp"
#include "riskfix/experiment.hpp"
#include "riskfix/fixed_point.hpp"
#include "riskfix/kernels.hpp"
#include "riskfix/sequence_risk.hpp"
#include "riskfix/signals.hpp"

using namespace riskfix;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Random seed")->envname("RISKFIX_SEED");
  cmd->add_option("--out", common.out, "Output path (default stdout)");
}

struct SetOptions {
  std::string constraint = "orthant";
  long long n = 0;
  double radius = 1.0;
  long long subspace_dim = 1;
};

void add_set_options(CLI::App* cmd, SetOptions& s, bool n_required) {
  cmd->add_option("--constraint", s.constraint, "orthant, monotone, l1_ball or subspace")
      ->capture_default_str();
  auto* n = cmd->add_option("--n", s.n, "Dimension")->check(CLI::PositiveNumber);
  if (n_required) n->required();
  cmd->add_option("--radius", s.radius, "l1_ball radius")->capture_default_str();
  cmd->add_option("--subspace-dim", s.subspace_dim, "Dimension of the coordinate subspace")
      ->capture_default_str();
}

ConstraintSet build_set(const SetOptions& s, Eigen::Index n) {
  return make_constraint(s.constraint, n, s.radius, s.subspace_dim);
}

std::string join(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

int run_project(const SetOptions& s, const std::string& input, const Common& common) {
  const Vector x = read_vector_file(input);
  if (s.n > 0 && s.n != x.size())
    throw DomainError("--n does not match the " + std::to_string(x.size()) + " input entries");
  const auto set = build_set(s, x.size());
  const auto result = project(set, x);
  std::ostringstream os;
  os << "set " << set.describe() << '\n'
     << "divergence " << format_double(result.divergence) << '\n'
     << "projection " << join(result.point) << '\n';
  write_text(common.out, os.str());
  return 0;
}

int run_kernels(double lo, double hi, int points, const Common& common) {
  if (!(lo >= 0.0) || !(hi > lo) || points < 2)
    throw DomainError("kernels needs 0 <= x-min < x-max and at least two points");
  std::ostringstream os;
  os << "x,G,H,G_prime\n";
  for (int k = 0; k < points; ++k) {
    const double x = k + 1 == points ? hi : lo + (hi - lo) * k / (points - 1);
    os << format_double(x) << ',' << format_double(kernel_G(x)) << ','
       << format_double(kernel_H(x)) << ',' << format_double(2.0 * x * normal_cdf(-x)) << '\n';
  }
  write_text(common.out, os.str());
  return 0;
}

Vector resolve_mu0(const std::string& file, const std::string& preset, long long n) {
  if (!file.empty()) {
    Vector v = read_vector_file(file);
    if (n > 0 && v.size() != n) throw ConfigError("--mu0-file length does not match --n");
    return v;
  }
  if (n < 1) throw ConfigError("--n is required with a signal preset");
  return make_signal(preset, n);
}

int run_risk_curve(const SetOptions& s, const std::string& mu0_file, const std::string& preset,
                   double sigma_min, double sigma_max, int grid, int samples,
                   const Common& common) {
  const Vector mu0 = resolve_mu0(mu0_file, preset, s.n);
  const auto set = build_set(s, mu0.size());
  const auto curve =
      mc_expectations(set, mu0, log_grid(sigma_min, sigma_max, grid), samples, common.seed);
  std::ostringstream os;
  os << "sigma,err_mean,err_se,lrt_mean,lrt_se,dof_mean,dof_se\n";
  for (std::size_t k = 0; k < curve.sigma_grid.size(); ++k) {
    os << format_double(curve.sigma_grid[k]) << ',' << format_double(curve.err_mean[k]) << ','
       << format_double(curve.err_se[k]) << ',' << format_double(curve.lrt_mean[k]) << ','
       << format_double(curve.lrt_se[k]) << ',' << format_double(curve.dof_mean[k]) << ','
       << format_double(curve.dof_se[k]) << '\n';
  }
  write_text(common.out, os.str());
  return 0;
}

nlohmann::json json_number(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

int run_fixed_point(const SetOptions& s, int m, double sigma, const std::string& signal,
                    int samples, double tol, const std::string& evaluator, bool as_json,
                    const Common& common) {
  if (!(sigma > 0.0)) throw DomainError("--sigma must be positive");
  const auto set = build_set(s, s.n);
  ErrEvaluator eval{EvaluatorKind::MonteCarlo, samples, common.seed};
  if (evaluator == "auto") {
    if (set.kind() == ConstraintKind::Orthant) eval.kind = EvaluatorKind::OrthantClosedForm;
    if (set.kind() == ConstraintKind::Subspace) eval.kind = EvaluatorKind::SubspaceClosedForm;
  } else if (evaluator != "mc") {
    throw ConfigError("--evaluator must be auto or mc");
  }

  SignalSpec spec;
  if (is_prior_spec(signal) && eval.kind == EvaluatorKind::OrthantClosedForm)
    spec = DiscretePrior::parse(signal);
  else
    spec = make_signal(signal, s.n);

  FixedPointProblem problem{set, spec, m, sigma * sigma, eval};
  SolveOptions options;
  options.tol = tol;
  const auto sol = solve(problem, options);
  const int iterations = sol.trace.empty() ? 0 : static_cast<int>(sol.trace.size()) - 1;

  std::ostringstream os;
  if (as_json) {
    nlohmann::json doc{{"status", to_string(sol.status)},
                       {"r_sq", json_number(sol.r_sq)},
                       {"r_sq_se", json_number(sol.r_sq_se)},
                       {"omega", json_number(sol.omega)},
                       {"regime", to_string(sol.regime)},
                       {"delta_K", json_number(sol.delta_K.value)},
                       {"delta_K_se", json_number(sol.delta_K.se)},
                       {"delta_T", json_number(sol.delta_T.value)},
                       {"delta_T_se", json_number(sol.delta_T.se)},
                       {"r2_statistic", json_number(sol.r2_statistic)},
                       {"r2_se", json_number(sol.r2_se)},
                       {"r2_holds", sol.r2_holds},
                       {"L_n", json_number(sol.L_n)},
                       {"lower_bound", json_number(sol.lower_bound)},
                       {"upper_bound", json_number(sol.upper_bound)},
                       {"iterations", iterations},
                       {"warnings", sol.warnings}};
    os << doc.dump(2) << '\n';
  } else {
    os << "status " << to_string(sol.status) << '\n'
       << "r_sq " << format_double(sol.r_sq) << '\n'
       << "r_sq_se " << format_double(sol.r_sq_se) << '\n'
       << "omega " << format_double(sol.omega) << '\n'
       << "regime " << to_string(sol.regime) << '\n'
       << "delta_K " << format_double(sol.delta_K.value) << " (se " << format_double(sol.delta_K.se)
       << ")\n"
       << "delta_T " << format_double(sol.delta_T.value) << " (se " << format_double(sol.delta_T.se)
       << ")\n"
       << "r2_statistic " << format_double(sol.r2_statistic) << (sol.r2_holds ? " holds" : "")
       << '\n'
       << "bounds " << format_double(sol.lower_bound) << ' ' << format_double(sol.upper_bound)
       << '\n'
       << "L_n " << format_double(sol.L_n) << '\n'
       << "iterations " << iterations << '\n';
    for (const auto& w : sol.warnings) os << "warning " << w << '\n';
  }
  write_text(common.out, os.str());
  return 0;
}

int run_simulate(const SetOptions& s, int m, double sigma, const std::string& signal,
                 int replicates, const std::string& solver, const std::string& noise,
                 const Common& common) {
  const auto set = build_set(s, s.n);
  const Vector mu0 = make_signal(signal, s.n);
  const auto result = empirical_risk(set, mu0, m, sigma, replicates, common.seed,
                                     parse_solver_choice(solver), parse_noise_kind(noise));
  std::ostringstream os;
  os << "replicate_id,risk,objective,iterations,solver,converged\n";
  for (const auto& r : result.replicates) {
    os << r.replicate_id << ',' << format_double(r.risk) << ',' << format_double(r.objective)
       << ',' << r.iterations << ',' << to_string(r.solver) << ','
       << (r.converged ? "true" : "false") << '\n';
  }
  write_text(common.out, os.str());
  std::cerr << "mean risk " << format_double(result.mean) << " (se " << format_double(result.se)
            << "), audited " << result.audited << ", audit failures " << result.audit_failures
            << '\n';
  return 0;
}

int run_experiment_command(const std::string& target, bool full, bool seed_given, int jobs,
                           const std::string& format, const Common& common) {
  ExperimentConfig cfg =
      is_preset_name(target) ? preset_config(target, full) : load_experiment_config(target);
  if (seed_given) cfg.seed = common.seed;
  if (jobs > 0) cfg.jobs = jobs;
  if (!format.empty()) cfg.format = format;
  const std::string path = common.out.empty() ? cfg.output : common.out;
  const auto records = run_experiment(cfg);
  emit_report(records, parse_report_format(cfg.format), path);
  for (const auto& r : records)
    if (!r.error.empty()) std::cerr << r.experiment_id << ": " << r.error << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic risk of convex-constrained least squares"};
  app.require_subcommand(1);

  // project
  Common c_project;
  SetOptions s_project;
  std::string project_input;
  auto* project_cmd = app.add_subcommand("project", "Project a vector onto a constraint set");
  add_set_options(project_cmd, s_project, false);
  project_cmd->add_option("--input", project_input, "Whitespace-separated vector file")
      ->required();
  add_common(project_cmd, c_project);

  // kernels
  Common c_kernels;
  double k_lo = 0.0, k_hi = 5.0;
  int k_points = 101;
  auto* kernels_cmd = app.add_subcommand("kernels", "Tabulate the G and H kernels as CSV");
  kernels_cmd->add_option("--x-min", k_lo)->capture_default_str();
  kernels_cmd->add_option("--x-max", k_hi)->capture_default_str();
  kernels_cmd->add_option("--points", k_points)->capture_default_str();
  add_common(kernels_cmd, c_kernels);

  // risk-curve
  Common c_curve;
  SetOptions s_curve;
  std::string mu0_file, mu0_preset = "zero";
  double sigma_min = 0.1, sigma_max = 10.0;
  int curve_grid = 20, curve_samples = 10000;
  auto* curve_cmd =
      app.add_subcommand("risk-curve", "Monte Carlo err/lrt/dof over a noise grid");
  add_set_options(curve_cmd, s_curve, false);
  auto* file_opt = curve_cmd->add_option("--mu0-file", mu0_file, "Signal vector file");
  curve_cmd->add_option("--mu0-preset", mu0_preset, "Signal preset")
      ->capture_default_str()
      ->excludes(file_opt);
  curve_cmd->add_option("--sigma-min", sigma_min)->capture_default_str();
  curve_cmd->add_option("--sigma-max", sigma_max)->capture_default_str();
  curve_cmd->add_option("--grid", curve_grid, "Number of log-spaced points")
      ->capture_default_str();
  curve_cmd->add_option("--samples", curve_samples)->capture_default_str();
  add_common(curve_cmd, c_curve);

  // fixed-point
  Common c_fp;
  SetOptions s_fp;
  int fp_m = 0, fp_samples = 10000;
  double fp_sigma = 1.0, fp_tol = 1e-6;
  std::string fp_signal = "zero", fp_evaluator = "auto";
  bool fp_json = false;
  auto* fp_cmd = app.add_subcommand("fixed-point", "Solve the risk fixed-point equation");
  add_set_options(fp_cmd, s_fp, true);
  fp_cmd->add_option("--m", fp_m, "Number of measurements")->required();
  fp_cmd->add_option("--sigma", fp_sigma)->capture_default_str();
  fp_cmd->add_option("--signal", fp_signal, "Preset, vector file or atoms=v1:w1,...")
      ->capture_default_str();
  fp_cmd->add_option("--samples", fp_samples)->capture_default_str();
  fp_cmd->add_option("--tol", fp_tol)->capture_default_str();
  fp_cmd->add_option("--evaluator", fp_evaluator, "auto (closed form when available) or mc")
      ->capture_default_str();
  fp_cmd->add_flag("--json", fp_json, "Print a JSON report");
  add_common(fp_cmd, c_fp);

  // simulate
  Common c_sim;
  SetOptions s_sim;
  int sim_m = 0, sim_replicates = 100;
  double sim_sigma = 1.0;
  std::string sim_signal = "zero", sim_solver = "auto", sim_noise = "gaussian";
  auto* sim_cmd = app.add_subcommand("simulate", "Empirical risk over Gaussian designs");
  add_set_options(sim_cmd, s_sim, true);
  sim_cmd->add_option("--m", sim_m)->required();
  sim_cmd->add_option("--sigma", sim_sigma)->capture_default_str();
  sim_cmd->add_option("--signal", sim_signal)->capture_default_str();
  sim_cmd->add_option("--replicates", sim_replicates)->capture_default_str();
  sim_cmd->add_option("--solver", sim_solver, "amp, pgd or auto")->capture_default_str();
  sim_cmd->add_option("--noise", sim_noise, "gaussian or rademacher")->capture_default_str();
  add_common(sim_cmd, c_sim);

  // experiment
  Common c_exp;
  std::string exp_target, exp_format;
  bool exp_full = false;
  int exp_jobs = 0;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a preset or a JSON experiment config");
  exp_cmd->add_option("target", exp_target, "figure2-left, figure2-right, degenerate or a path")
      ->required();
  exp_cmd->add_flag("--full", exp_full, "Extend figure2-right to n = 500");
  exp_cmd->add_option("--jobs", exp_jobs, "Grid points run concurrently");
  exp_cmd->add_option("--format", exp_format, "csv or json");
  auto* exp_seed = exp_cmd->add_option("--seed", c_exp.seed, "Random seed")->envname("RISKFIX_SEED");
  exp_cmd->add_option("--out", c_exp.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*project_cmd) return run_project(s_project, project_input, c_project);
    if (*kernels_cmd) return run_kernels(k_lo, k_hi, k_points, c_kernels);
    if (*curve_cmd)
      return run_risk_curve(s_curve, mu0_file, mu0_preset, sigma_min, sigma_max, curve_grid,
                            curve_samples, c_curve);
    if (*fp_cmd)
      return run_fixed_point(s_fp, fp_m, fp_sigma, fp_signal, fp_samples, fp_tol, fp_evaluator,
                             fp_json, c_fp);
    if (*sim_cmd)
      return run_simulate(s_sim, sim_m, sim_sigma, sim_signal, sim_replicates, sim_solver,
                          sim_noise, c_sim);
    if (*exp_cmd)
      return run_experiment_command(exp_target, exp_full, exp_seed->count() > 0, exp_jobs,
                                    exp_format, c_exp);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
