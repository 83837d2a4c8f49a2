#pragma once

#include <cstdint>
#include <vector>

#include "riskfix/constraint_set.hpp"

namespace riskfix {

/// err, lrt and dof of the sequence-model LSE Pi_K(mu0 + sigma h) on one path.
struct ProcessSample {
  double sigma = 0.0;
  /// ||fit - mu0||^2
  double err = 0.0;
  /// ||y - mu0||^2 - ||y - fit||^2
  double lrt = 0.0;
  /// <fit - mu0, sigma h>
  double dof = 0.0;
};

/// Throws DomainError if mu0 is not in K (1e-8) or sigma <= 0.
ProcessSample eval_processes(const ConstraintSet& set, const Vector& mu0, double sigma,
                             const Vector& h);

/// Same as eval_processes without the membership check, for inner loops
/// whose caller has already validated mu0.
ProcessSample eval_processes_unchecked(const ConstraintSet& set, const Vector& mu0,
                                       double sigma, const Eigen::Ref<const Vector>& h);

/// Monte Carlo means and standard errors of the three processes over a
/// sigma grid. Every grid point uses the same h draws.
struct RiskCurve {
  std::vector<double> sigma_grid;
  std::vector<double> err_mean, err_se;
  std::vector<double> lrt_mean, lrt_se;
  std::vector<double> dof_mean, dof_se;
  int samples = 0;
  std::uint64_t base_seed = 0;
};

/// Requires samples >= 100 and a strictly increasing positive grid.
RiskCurve mc_expectations(const ConstraintSet& set, const Vector& mu0,
                          const std::vector<double>& sigma_grid, int samples,
                          std::uint64_t base_seed);

/// Exact E err(sigma) for the orthant: sigma^2 sum_i G(mu0_i / sigma).
double orthant_err_closed_form(const Vector& mu0, double sigma);
/// Exact E lrt(sigma) for the orthant: E err(sigma) + 2 sigma^2 sum_i H(mu0_i / sigma).
double orthant_lrt_closed_form(const Vector& mu0, double sigma);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace riskfix
