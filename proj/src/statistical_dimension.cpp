#include <cmath>
#include <vector>

#include "riskfix/constraint_set.hpp"
#include "riskfix/errors.hpp"

namespace riskfix {

namespace {

constexpr double kRelativeStop = 1e-3;
constexpr int kMaxScaleSteps = 60;

void check_mc(const MonteCarloConfig& mc) {
  if (mc.samples < 100) throw DomainError("Monte Carlo estimates need at least 100 samples");
}

// Mean and SE of ||Pi_K(center + sigma h) - center||^2 / sigma^2 over the bank.
Estimate scaled_error(const ConstraintSet& set, const Vector& center, double sigma,
                      const GaussianBank& bank) {
  std::vector<double> values(static_cast<std::size_t>(bank.samples()));
  parallel_for(values.size(), [&](std::size_t j) {
    const Vector y = center + sigma * bank.column(static_cast<int>(j));
    values[j] = (project_onto(set, y) - center).squaredNorm() / (sigma * sigma);
  });
  return summarize(values);
}

}  // namespace

Estimate statistical_dimension(const ConstraintSet& set, const MonteCarloConfig& mc) {
  check_mc(mc);
  const auto n = set.dimension();
  if (mc.allow_closed_form) {
    if (set.kind() == ConstraintKind::Orthant) return {static_cast<double>(n) / 2.0, 0.0};
    if (set.kind() == ConstraintKind::Subspace)
      return {static_cast<double>(set.subspace_dimension()), 0.0};
  }

  const GaussianBank bank(n, mc.samples, mc.seed);
  const Vector origin = Vector::Zero(n);
  if (set.is_cone()) return scaled_error(set, origin, 1.0, bank);

  // Non-cones: E||Pi_K(sigma h)||^2 / sigma^2 at doubling sigma. For bounded
  // sets the limit is 0 and the ratio of successive values tends to 1/4, so
  // the stop rule also accepts an absolute change below the same threshold.
  double sigma = 1.0;
  Estimate previous = scaled_error(set, origin, sigma, bank);
  for (int step = 0; step < kMaxScaleSteps; ++step) {
    sigma *= 2.0;
    const Estimate current = scaled_error(set, origin, sigma, bank);
    const double change = std::abs(current.value - previous.value);
    previous = current;
    if (change < kRelativeStop * std::max(std::abs(current.value), 1.0)) break;
  }
  return previous;
}

Estimate tangent_dimension(const ConstraintSet& set, const Vector& mu0,
                           const MonteCarloConfig& mc) {
  if (!set.contains(mu0, 1e-8))
    throw DomainError("tangent_dimension: mu0 is not in " + set.describe());
  check_mc(mc);
  const auto n = set.dimension();
  if (mc.allow_closed_form) {
    if (set.kind() == ConstraintKind::Orthant) {
      const auto zeros = (mu0.array() <= 1e-8).count();
      return {static_cast<double>(n) - static_cast<double>(zeros) / 2.0, 0.0};
    }
    if (set.kind() == ConstraintKind::Subspace)
      return {static_cast<double>(set.subspace_dimension()), 0.0};
  }

  const GaussianBank bank(n, mc.samples, mc.seed);
  double sigma = 1e-2;
  Estimate previous = scaled_error(set, mu0, sigma, bank);
  for (int step = 0; step < kMaxScaleSteps; ++step) {
    sigma /= 2.0;
    const Estimate current = scaled_error(set, mu0, sigma, bank);
    const double change = std::abs(current.value - previous.value);
    previous = current;
    if (change <= kRelativeStop * std::abs(current.value)) break;
  }
  return previous;
}

}  // namespace riskfix
