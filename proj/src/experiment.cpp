#include "riskfix/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "riskfix/errors.hpp"
#include "riskfix/fixed_point.hpp"
#include "riskfix/signals.hpp"

namespace riskfix {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* field) {
  if (!doc.contains(field)) throw ConfigError(std::string("missing field '") + field + "'");
  return doc.at(field);
}

double positive_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError("field '" + field + "': expected a number");
  const double x = value.get<double>();
  if (!(x > 0.0) || !std::isfinite(x))
    throw ConfigError("field '" + field + "': expected a positive number");
  return x;
}

long long positive_integer(const json& value, const std::string& field) {
  if (!value.is_number_integer() || value.get<long long>() < 1)
    throw ConfigError("field '" + field + "': expected a positive integer");
  return value.get<long long>();
}

std::string string_field(const json& value, const std::string& field) {
  if (!value.is_string()) throw ConfigError("field '" + field + "': expected a string");
  return value.get<std::string>();
}

// Orthant and subspace problems have exact risk maps.
EvaluatorKind theory_evaluator(const ConstraintSet& set) {
  switch (set.kind()) {
    case ConstraintKind::Orthant:
      return EvaluatorKind::OrthantClosedForm;
    case ConstraintKind::Subspace:
      return EvaluatorKind::SubspaceClosedForm;
    default:
      return EvaluatorKind::MonteCarlo;
  }
}

ExperimentRecord run_point(const ExperimentConfig& config, const std::string& signal,
                           const GridPoint& point, std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.experiment_id = config.name + "-" + std::to_string(index);
  rec.n = point.n;
  rec.m = point.m;
  rec.sigma = config.sigma;
  rec.constraint = config.constraint;
  rec.signal = signal;
  try {
    const auto set = make_constraint(config.constraint, point.n, config.radius, config.subspace_dim);
    rec.constraint = std::string(to_string(set.kind()));
    const Vector mu0 = make_signal(signal, point.n);

    FixedPointProblem problem{set, mu0, point.m, config.sigma * config.sigma,
                              ErrEvaluator{theory_evaluator(set), config.samples,
                                           child_seed(config.seed, 2 * index)}};
    SolveOptions options;
    if (problem.evaluator.kind != EvaluatorKind::MonteCarlo) options.tol = 1e-10;
    const auto theory = solve(problem, options);
    rec.regime = std::string(to_string(theory.regime));
    if (theory.status != SolveStatus::NoSolution) {
      rec.r_theory_sq = theory.r_sq;
      rec.r_theory_se = theory.r_sq_se;
      rec.r2_statistic = theory.r2_statistic;
    }

    const auto emp = empirical_risk(set, mu0, point.m, config.sigma, config.replicates,
                                    child_seed(config.seed, 2 * index + 1), config.solver,
                                    config.noise);
    rec.risk_emp_mean = emp.mean;
    rec.risk_emp_se = emp.se;
    if (rec.r_theory_sq > 0.0 && emp.mean > 0.0)
      rec.ratio = std::sqrt(rec.r_theory_sq) / std::sqrt(emp.mean);
  } catch (const std::exception& e) {
    rec.regime = "error";
    rec.error = e.what();
  }
  rec.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // Report the byte offset as line and column.
    std::size_t line = 1, column = 1;
    const auto limit = std::min<std::size_t>(e.byte, json_text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) {
      if (json_text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = string_field(doc["name"], "name");
  cfg.constraint = string_field(require(doc, "constraint"), "constraint");
  try {
    parse_constraint_kind(cfg.constraint);
  } catch (const DescriptorError& e) {
    throw ConfigError(std::string("field 'constraint': ") + e.what());
  }
  if (doc.contains("radius")) cfg.radius = positive_number(doc["radius"], "radius");
  if (doc.contains("subspace_dim"))
    cfg.subspace_dim = positive_integer(doc["subspace_dim"], "subspace_dim");

  if (doc.contains("signals")) {
    const auto& list = doc["signals"];
    if (!list.is_array() || list.empty())
      throw ConfigError("field 'signals': expected a nonempty array of strings");
    cfg.signals.clear();
    for (std::size_t i = 0; i < list.size(); ++i)
      cfg.signals.push_back(string_field(list[i], "signals[" + std::to_string(i) + "]"));
  } else if (doc.contains("signal")) {
    cfg.signals = {string_field(doc["signal"], "signal")};
  }

  const auto& grid = require(doc, "grid");
  if (!grid.is_array() || grid.empty())
    throw ConfigError("field 'grid': expected a nonempty array of {n, m} objects");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string where = "grid[" + std::to_string(i) + "]";
    if (!grid[i].is_object()) throw ConfigError("field '" + where + "': expected an object");
    GridPoint p;
    p.n = positive_integer(require(grid[i], "n"), where + ".n");
    p.m = static_cast<int>(positive_integer(require(grid[i], "m"), where + ".m"));
    cfg.grid.push_back(p);
  }

  if (doc.contains("sigma")) cfg.sigma = positive_number(doc["sigma"], "sigma");
  if (doc.contains("replicates"))
    cfg.replicates = static_cast<int>(positive_integer(doc["replicates"], "replicates"));
  if (doc.contains("samples"))
    cfg.samples = static_cast<int>(positive_integer(doc["samples"], "samples"));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ConfigError("field 'seed': expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("solver"))
    cfg.solver = parse_solver_choice(string_field(doc["solver"], "solver"));
  if (doc.contains("noise")) cfg.noise = parse_noise_kind(string_field(doc["noise"], "noise"));
  if (doc.contains("jobs")) cfg.jobs = static_cast<int>(positive_integer(doc["jobs"], "jobs"));
  if (doc.contains("output")) cfg.output = string_field(doc["output"], "output");
  if (doc.contains("format")) {
    cfg.format = string_field(doc["format"], "format");
    parse_report_format(cfg.format);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

bool is_preset_name(std::string_view name) {
  return name == "figure2-left" || name == "figure2-right" || name == "degenerate";
}

ExperimentConfig preset_config(std::string_view name, bool full) {
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  if (name == "figure2-left") {
    cfg.constraint = "orthant";
    cfg.signals = {"constant(5)"};
    for (int m : {40, 60, 100, 200, 400}) cfg.grid.push_back({50, m});
    cfg.replicates = 1000;
  } else if (name == "figure2-right") {
    cfg.constraint = "monotone";
    cfg.signals = {"zero", "linear", "quadratic"};
    const int top = full ? 500 : 300;
    for (int n = 100; n <= top; n += 100) cfg.grid.push_back({n, n});
    cfg.replicates = 200;
  } else if (name == "degenerate") {
    cfg.constraint = "orthant";
    cfg.signals = {"zero"};
    cfg.grid = {{50, 20}};
    cfg.replicates = 100;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected figure2-left, figure2-right or degenerate)");
  }
  return cfg;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  if (config.grid.empty() || config.signals.empty())
    throw ConfigError("experiment needs at least one grid point and one signal");
  struct Task {
    const std::string* signal;
    GridPoint point;
  };
  std::vector<Task> tasks;
  for (const auto& s : config.signals)
    for (const auto& p : config.grid) tasks.push_back({&s, p});

  std::vector<ExperimentRecord> records(tasks.size());
  const auto body = [&](std::size_t k) {
    records[k] = run_point(config, *tasks[k].signal, tasks[k].point, k);
  };
  if (config.jobs > 1) {
    // Grid points in parallel; replicates inside each point then run serially.
    const unsigned previous = max_threads();
    set_max_threads(static_cast<unsigned>(config.jobs));
    parallel_for(tasks.size(), body);
    set_max_threads(previous);
  } else {
    for (std::size_t k = 0; k < tasks.size(); ++k) body(k);
  }
  return records;
}

}  // namespace riskfix
