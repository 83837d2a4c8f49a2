#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskfix/linear_experiments.hpp"

namespace riskfix {

struct GridPoint {
  Eigen::Index n = 0;
  int m = 0;
};

/// A batch of (theory, simulation) comparisons. Every signal is run at every
/// grid point; records come out signal-major, then in grid order.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string constraint = "orthant";
  double radius = 1.0;            // l1_ball only
  Eigen::Index subspace_dim = 1;  // subspace only
  std::vector<std::string> signals{"zero"};
  std::vector<GridPoint> grid;
  double sigma = 1.0;
  int replicates = 100;
  int samples = 10000;
  std::uint64_t seed = 1;
  SolverChoice solver = SolverChoice::Auto;
  NoiseKind noise = NoiseKind::Gaussian;
  int jobs = 1;
  std::string output;
  std::string format = "csv";
};

/// Throws ConfigError naming the offending field or the parse position.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// figure2-left, figure2-right (full = true extends to n = 500) and
/// degenerate. Throws ConfigError for unknown names.
ExperimentConfig preset_config(std::string_view name, bool full = false);
bool is_preset_name(std::string_view name);

/// One row of the report. Missing numbers are NaN (empty in CSV, null in JSON).
struct ExperimentRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::string experiment_id;
  long long n = 0;
  long long m = 0;
  double sigma = kNaN;
  std::string constraint;
  std::string signal;
  double r_theory_sq = kNaN;
  double r_theory_se = kNaN;
  double risk_emp_mean = kNaN;
  double risk_emp_se = kNaN;
  double ratio = kNaN;
  double r2_statistic = kNaN;
  std::string regime;
  double runtime_seconds = kNaN;

  /// Not part of the report; set when the grid point failed.
  std::string error;
};

/// Solves the fixed point and simulates at every grid point. A failing grid
/// point yields a record with regime "error" and the message in `error`.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Csv, Json };
ReportFormat parse_report_format(std::string_view name);

inline constexpr std::string_view kReportHeader =
    "experiment_id,n,m,sigma,constraint,signal,r_theory_sq,r_theory_se,risk_emp_mean,"
    "risk_emp_se,ratio,r2_statistic,regime,runtime_seconds";

std::string format_report(const std::vector<ExperimentRecord>& records, ReportFormat format);
/// Throws DomainError for an empty record list and IoError when the path is
/// not writable.
void emit_report(const std::vector<ExperimentRecord>& records, ReportFormat format,
                 const std::string& path);

std::vector<ExperimentRecord> parse_report_csv(std::string_view text);
std::vector<ExperimentRecord> parse_report_json(std::string_view text);

/// Shortest decimal form that reads back to the same double; "" for NaN.
std::string format_double(double value);

/// Writes text to path, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace riskfix
