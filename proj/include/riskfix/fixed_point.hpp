#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskfix/constraint_set.hpp"
#include "riskfix/kernels.hpp"

namespace riskfix {

/// Sample-size regimes relative to delta_K and delta_{T_K(mu0)}.
/// I: m > delta_T (exact recovery possible when noiseless),
/// II: delta_K < m < delta_T, III: m < delta_K.
enum class Regime { I, II, III, Indeterminate };

std::string_view to_string(Regime regime);

/// Classifies m against the two dimensions with 3-SE guard bands on each;
/// Indeterminate when m falls inside a band.
Regime classify_regime(double m, Estimate delta_K, Estimate delta_T);

/// omega_delta(r) = sqrt((r^2 + sigma^2) / delta), the effective noise level
/// of the sequence model matched to m / n = delta. Throws for delta <= 0.
double omega(double r, double delta, double sigma);

enum class EvaluatorKind { MonteCarlo, OrthantClosedForm, SubspaceClosedForm };

/// How n^{-1} E err(omega) is evaluated inside the fixed-point iteration.
struct ErrEvaluator {
  EvaluatorKind kind = EvaluatorKind::MonteCarlo;
  int samples = 10000;
  std::uint64_t seed = 0;
};

/// An explicit signal vector or an i.i.d. coordinate prior (orthant only).
using SignalSpec = std::variant<Vector, DiscretePrior>;

struct FixedPointProblem {
  ConstraintSet constraint;
  SignalSpec signal;
  int m = 0;
  double sigma2 = 1.0;
  ErrEvaluator evaluator;

  [[nodiscard]] Eigen::Index n() const { return constraint.dimension(); }
};

enum class SolveStatus { Converged, NoSolution, MaxIterations };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
  /// Stop when |r_{t+1} - r_t| / max(r_t, 1e-12) < tol.
  double tol = 1e-6;
  int max_iter = 200;
  /// Starting value r_0^2 (0 gives the monotone iteration).
  double initial_r_sq = 0.0;
};

struct FixedPointSolution {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  SolveStatus status = SolveStatus::NoSolution;
  /// r_n^2; NaN when status is NoSolution.
  double r_sq = kNaN;
  /// Propagated Monte Carlo standard error of r_sq (0 for closed forms).
  double r_sq_se = 0.0;
  /// omega_{m/n}(r_n).
  double omega = kNaN;
  /// r_t^2 for t = 0, 1, ..., including the starting value.
  std::vector<double> trace;

  Estimate delta_K;
  Estimate delta_T;
  Regime regime = Regime::Indeterminate;

  /// (E lrt(omega_n) - E err(omega_n)) / (2 n sigma^2).
  double r2_statistic = kNaN;
  double r2_se = 0.0;
  bool r2_holds = false;
  /// r2_statistic + 3 r2_se < 1.
  bool r2_verified = false;

  /// log(1 + delta_T) + log log(16 n).
  double L_n = kNaN;
  /// delta_K / (m - delta_K) <= r_n^2 / sigma^2 <= delta_T / (m - delta_T)_+.
  double lower_bound = kNaN;
  double upper_bound = kNaN;

  std::vector<std::string> warnings;
};

/// Solves n^{-1} E err(omega_{m/n}(r)) = r^2 by the monotone iteration
/// r_{t+1}^2 = n^{-1} E err(omega_{m/n}(r_t)) from r_0 = 0. The Monte Carlo
/// evaluator reuses one bank of Gaussian draws for every iteration and for
/// the dimension estimates, so the iteration map is deterministic.
FixedPointSolution solve(const FixedPointProblem& problem, const SolveOptions& options = {});

/// n^{-1} E err(omega_{m/n}(0)), the one-step approximation to r_n^2 when
/// the risk vanishes.
double vanishing_risk_shortcut(const FixedPointProblem& problem);

/// Orthant fixed point for i.i.d. coordinates with law `prior`:
/// omega^2 E G(U / omega) = r^2 with omega = omega_ratio(r). Returns r^2.
/// Throws NoSolutionError when ratio <= 1/2.
double nnls_solve(const DiscretePrior& prior, double ratio, double sigma, double tol = 1e-10);

struct R2Check {
  double statistic = 0.0;
  bool holds = false;
};

/// omega^2 E H(U / omega) / sigma^2 at omega = omega_ratio(r); holds when < 1.
R2Check nnls_check_R2(const DiscretePrior& prior, double r_sq, double ratio, double sigma);

}  // namespace riskfix
