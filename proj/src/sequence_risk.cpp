#include "riskfix/sequence_risk.hpp"

#include <cmath>

#include "riskfix/errors.hpp"
#include "riskfix/kernels.hpp"

namespace riskfix {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be positive and finite");
}

void check_orthant_signal(const Vector& mu0) {
  if (!mu0.allFinite() || (mu0.size() > 0 && mu0.minCoeff() < 0.0))
    throw DomainError("orthant closed forms need a nonnegative finite mu0");
}

}  // namespace

ProcessSample eval_processes_unchecked(const ConstraintSet& set, const Vector& mu0,
                                       double sigma, const Eigen::Ref<const Vector>& h) {
  const Vector noise = sigma * h;
  const Vector fit = project_onto(set, mu0 + noise);
  const Vector delta = fit - mu0;
  ProcessSample out;
  out.sigma = sigma;
  out.err = delta.squaredNorm();
  out.lrt = noise.squaredNorm() - (noise - delta).squaredNorm();
  out.dof = delta.dot(noise);
  return out;
}

ProcessSample eval_processes(const ConstraintSet& set, const Vector& mu0, double sigma,
                             const Vector& h) {
  check_sigma(sigma);
  if (h.size() != set.dimension()) throw DomainError("h has the wrong dimension");
  if (!set.contains(mu0, 1e-8))
    throw DomainError("mu0 is not in " + set.describe());
  return eval_processes_unchecked(set, mu0, sigma, h);
}

RiskCurve mc_expectations(const ConstraintSet& set, const Vector& mu0,
                          const std::vector<double>& sigma_grid, int samples,
                          std::uint64_t base_seed) {
  if (samples < 100) throw DomainError("mc_expectations needs at least 100 samples");
  if (sigma_grid.empty()) throw DomainError("sigma grid is empty");
  for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
    check_sigma(sigma_grid[k]);
    if (k > 0 && !(sigma_grid[k] > sigma_grid[k - 1]))
      throw DomainError("sigma grid must be strictly increasing");
  }
  if (!set.contains(mu0, 1e-8)) throw DomainError("mu0 is not in " + set.describe());

  const GaussianBank bank(set.dimension(), samples, base_seed);
  const auto points = sigma_grid.size();
  const auto count = static_cast<std::size_t>(samples);
  std::vector<double> err(points * count), lrt(points * count), dof(points * count);
  parallel_for(count, [&](std::size_t j) {
    for (std::size_t k = 0; k < points; ++k) {
      const auto s = eval_processes_unchecked(set, mu0, sigma_grid[k],
                                              bank.column(static_cast<int>(j)));
      err[k * count + j] = s.err;
      lrt[k * count + j] = s.lrt;
      dof[k * count + j] = s.dof;
    }
  });

  RiskCurve curve;
  curve.sigma_grid = sigma_grid;
  curve.samples = samples;
  curve.base_seed = base_seed;
  for (std::size_t k = 0; k < points; ++k) {
    const auto slice = [&](const std::vector<double>& v) {
      return std::span<const double>(v.data() + k * count, count);
    };
    const auto e = summarize(slice(err)), l = summarize(slice(lrt)), d = summarize(slice(dof));
    curve.err_mean.push_back(e.value);
    curve.err_se.push_back(e.se);
    curve.lrt_mean.push_back(l.value);
    curve.lrt_se.push_back(l.se);
    curve.dof_mean.push_back(d.value);
    curve.dof_se.push_back(d.se);
  }
  return curve;
}

double orthant_err_closed_form(const Vector& mu0, double sigma) {
  check_sigma(sigma);
  check_orthant_signal(mu0);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < mu0.size(); ++i) sum += kernel_G(mu0[i] / sigma);
  return sigma * sigma * sum;
}

double orthant_lrt_closed_form(const Vector& mu0, double sigma) {
  check_sigma(sigma);
  check_orthant_signal(mu0);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < mu0.size(); ++i) sum += kernel_H(mu0[i] / sigma);
  return orthant_err_closed_form(mu0, sigma) + 2.0 * sigma * sigma * sum;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw DomainError("log_grid needs 0 < lo < hi and at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
  grid.back() = hi;
  return grid;
}

}  // namespace riskfix
