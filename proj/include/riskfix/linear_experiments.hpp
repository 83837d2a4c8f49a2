#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "riskfix/constraint_set.hpp"

namespace riskfix {

enum class NoiseKind { Gaussian, Rademacher };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// One draw of Y = X mu0 + xi with X_ij ~ N(0, 1/n) i.i.d.
struct DesignInstance {
  Matrix X;
  Vector xi;
  Vector Y;
  Vector mu0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Throws DomainError for m, n < 1, sigma <= 0 or a non-finite mu0.
DesignInstance generate_instance(int m, const Vector& mu0, double sigma, NoiseKind noise,
                                 std::uint64_t seed);

enum class SolverKind { Amp, Pgd };
enum class SolverChoice { Amp, Pgd, Auto };

std::string_view to_string(SolverKind kind);
SolverChoice parse_solver_choice(std::string_view name);

struct SolverResult {
  Vector mu_hat;
  /// ||Y - X mu_hat||^2 / m
  double objective = 0.0;
  int iterations = 0;
  SolverKind solver = SolverKind::Amp;
  bool converged = false;
  /// n^{-1} ||mu_hat - mu0||^2
  double risk = 0.0;
  /// Per-iteration objective, filled by pgd_solve when requested.
  std::vector<double> objective_trace;
};

struct AmpOptions {
  double tol = 1e-8;
  int max_iter = 100;
};

/// Approximate message passing for min_{mu in K} ||Y - X mu||^2 with the
/// N(0, 1/n) design scaling:
///   mu^{t+1} = Pi_K((n/m) X^T r^t + mu^t)
///   r^{t+1}  = Y - X mu^{t+1} + (div Pi_K((n/m) X^T r^t + mu^t) / m) r^t
/// from mu^0 = 0, r^0 = Y. If the iterates blow up the result of pgd_solve
/// is returned instead (solver = Pgd).
SolverResult amp_solve(const ConstraintSet& set, const DesignInstance& inst,
                       const AmpOptions& options = {});

struct PgdOptions {
  double tol = 1e-10;
  int max_iter = 50000;
  bool record_objective = false;
};

/// Projected gradient descent on ||Y - X mu||^2 / (2m) with step
/// m / sigma_max(X)^2, stopping on a relative objective decrease below tol.
SolverResult pgd_solve(const ConstraintSet& set, const DesignInstance& inst,
                       const PgdOptions& options = {});

struct ReplicateOutcome {
  int replicate_id = 0;
  double risk = 0.0;
  double objective = 0.0;
  int iterations = 0;
  SolverKind solver = SolverKind::Amp;
  bool converged = false;
  /// Set on audited replicates whose AMP objective exceeds the PGD
  /// objective by more than 1e-4 (1 + objective).
  bool audit_flag = false;
};

struct EmpiricalRisk {
  double mean = 0.0;
  double se = 0.0;
  std::vector<ReplicateOutcome> replicates;
  int audited = 0;
  int audit_failures = 0;
};

/// Empirical n^{-1} E||mu_hat - mu0||^2 over independent design instances
/// (replicate i uses child seed i of base_seed). Auto runs AMP and falls back
/// to PGD when AMP does not converge. Every 20th AMP replicate is re-solved
/// with PGD as a near-minimizer audit.
EmpiricalRisk empirical_risk(const ConstraintSet& set, const Vector& mu0, int m, double sigma,
                             int replicates, std::uint64_t base_seed, SolverChoice choice,
                             NoiseKind noise = NoiseKind::Gaussian);

/// Largest singular value of X by power iteration on X^T X.
double spectral_norm(const Matrix& X, int iterations = 100);

}  // namespace riskfix
