#include "riskfix/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "riskfix/errors.hpp"
#include "riskfix/sequence_risk.hpp"

namespace riskfix {

namespace {

constexpr double kGuardSEs = 3.0;
constexpr int kNnlsMaxIterations = 10'000'000;

// n^{-1} E err(omega) and n^{-1} E (lrt - err)(omega) for one problem, plus
// the two statistical dimensions.
class RiskMap {
 public:
  explicit RiskMap(const FixedPointProblem& problem) : problem_(problem), n_(problem.n()) {
    const auto& set = problem.constraint;
    const auto* vector = std::get_if<Vector>(&problem.signal);
    if (vector != nullptr) {
      if (!set.contains(*vector, 1e-8))
        throw DomainError("signal is not in " + set.describe());
    }

    switch (problem.evaluator.kind) {
      case EvaluatorKind::MonteCarlo: {
        if (vector == nullptr)
          throw DomainError("the Monte Carlo evaluator needs an explicit signal vector");
        const MonteCarloConfig mc{problem.evaluator.samples, problem.evaluator.seed, true};
        if (mc.samples < 100) throw DomainError("Monte Carlo evaluator needs >= 100 samples");
        bank_ = std::make_unique<GaussianBank>(n_, mc.samples, mc.seed);
        delta_K_ = statistical_dimension(set, mc);
        delta_T_ = tangent_dimension(set, *vector, mc);
        break;
      }
      case EvaluatorKind::OrthantClosedForm: {
        if (set.kind() != ConstraintKind::Orthant)
          throw DomainError("orthant closed form requires the orthant constraint");
        delta_K_ = {static_cast<double>(n_) / 2.0, 0.0};
        if (vector != nullptr) {
          const auto zeros = (vector->array() <= 1e-8).count();
          delta_T_ = {static_cast<double>(n_) - static_cast<double>(zeros) / 2.0, 0.0};
        } else {
          const auto& prior = std::get<DiscretePrior>(problem.signal);
          delta_T_ = {static_cast<double>(n_) * (1.0 - prior.mass_at_zero() / 2.0), 0.0};
        }
        break;
      }
      case EvaluatorKind::SubspaceClosedForm: {
        if (set.kind() != ConstraintKind::Subspace)
          throw DomainError("subspace closed form requires a subspace constraint");
        if (vector == nullptr) throw DomainError("subspace problems need a signal vector");
        const auto d = static_cast<double>(set.subspace_dimension());
        delta_K_ = delta_T_ = {d, 0.0};
        break;
      }
    }
  }

  [[nodiscard]] Estimate delta_K() const { return delta_K_; }
  [[nodiscard]] Estimate delta_T() const { return delta_T_; }

  /// n^{-1} E err(omega).
  [[nodiscard]] Estimate normalized_err(double omega) const {
    const double n = static_cast<double>(n_);
    switch (problem_.evaluator.kind) {
      case EvaluatorKind::MonteCarlo: {
        const auto samples = sample(omega);
        std::vector<double> err(samples.size());
        for (std::size_t j = 0; j < samples.size(); ++j) err[j] = samples[j].err / n;
        return summarize(err);
      }
      case EvaluatorKind::OrthantClosedForm:
        if (const auto* v = std::get_if<Vector>(&problem_.signal))
          return {orthant_err_closed_form(*v, omega) / n, 0.0};
        return {omega * omega * prior_G(std::get<DiscretePrior>(problem_.signal), omega), 0.0};
      case EvaluatorKind::SubspaceClosedForm:
        return {omega * omega * delta_K_.value / n, 0.0};
    }
    return {};
  }

  /// n^{-1} E (lrt - err)(omega).
  [[nodiscard]] Estimate normalized_lrt_excess(double omega) const {
    const double n = static_cast<double>(n_);
    switch (problem_.evaluator.kind) {
      case EvaluatorKind::MonteCarlo: {
        const auto samples = sample(omega);
        std::vector<double> excess(samples.size());
        for (std::size_t j = 0; j < samples.size(); ++j)
          excess[j] = (samples[j].lrt - samples[j].err) / n;
        return summarize(excess);
      }
      case EvaluatorKind::OrthantClosedForm: {
        if (const auto* v = std::get_if<Vector>(&problem_.signal)) {
          double sum_h = 0.0;
          for (Eigen::Index i = 0; i < v->size(); ++i) sum_h += kernel_H((*v)[i] / omega);
          return {2.0 * omega * omega * sum_h / n, 0.0};
        }
        const auto& prior = std::get<DiscretePrior>(problem_.signal);
        return {2.0 * omega * omega * prior_H(prior, omega), 0.0};
      }
      case EvaluatorKind::SubspaceClosedForm:
        return {0.0, 0.0};
    }
    return {};
  }

 private:
  [[nodiscard]] std::vector<ProcessSample> sample(double omega) const {
    const auto& mu0 = std::get<Vector>(problem_.signal);
    std::vector<ProcessSample> out(static_cast<std::size_t>(bank_->samples()));
    parallel_for(out.size(), [&](std::size_t j) {
      out[j] = eval_processes_unchecked(problem_.constraint, mu0, omega,
                                        bank_->column(static_cast<int>(j)));
    });
    return out;
  }

  const FixedPointProblem& problem_;
  Eigen::Index n_;
  std::unique_ptr<GaussianBank> bank_;
  Estimate delta_K_;
  Estimate delta_T_;
};

void validate(const FixedPointProblem& problem) {
  if (problem.m < 1) throw DomainError("m must be at least 1");
  if (!(problem.sigma2 > 0.0) || !std::isfinite(problem.sigma2))
    throw DomainError("sigma^2 must be positive and finite");
  if (const auto* v = std::get_if<Vector>(&problem.signal)) {
    if (v->size() != problem.n())
      throw DomainError("signal dimension does not match the constraint set");
  } else if (problem.constraint.kind() != ConstraintKind::Orthant ||
             problem.evaluator.kind != EvaluatorKind::OrthantClosedForm) {
    throw DomainError("prior signals are supported with the orthant closed form only");
  }
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::I:
      return "I";
    case Regime::II:
      return "II";
    case Regime::III:
      return "III";
    case Regime::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::NoSolution:
      return "no_solution";
    case SolveStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

Regime classify_regime(double m, Estimate delta_K, Estimate delta_T) {
  const double k_lo = delta_K.value - kGuardSEs * delta_K.se;
  const double k_hi = delta_K.value + kGuardSEs * delta_K.se;
  const double t_lo = delta_T.value - kGuardSEs * delta_T.se;
  const double t_hi = delta_T.value + kGuardSEs * delta_T.se;
  if (m > t_hi) return Regime::I;
  if (m < k_lo) return Regime::III;
  if (m > k_hi && m < t_lo) return Regime::II;
  return Regime::Indeterminate;
}

double omega(double r, double delta, double sigma) {
  if (!(delta > 0.0)) throw DomainError("omega: delta must be positive");
  if (!(r >= 0.0)) throw DomainError("omega: r must be nonnegative");
  return std::sqrt((r * r + sigma * sigma) / delta);
}

FixedPointSolution solve(const FixedPointProblem& problem, const SolveOptions& options) {
  validate(problem);
  if (!(options.tol > 0.0) || options.max_iter < 1 || !(options.initial_r_sq >= 0.0))
    throw DomainError("invalid solver options");

  const RiskMap map(problem);
  const double m = problem.m;
  const double n = static_cast<double>(problem.n());
  const double sigma = std::sqrt(problem.sigma2);
  const double ratio = m / n;

  FixedPointSolution out;
  out.delta_K = map.delta_K();
  out.delta_T = map.delta_T();
  out.L_n = std::log(1.0 + out.delta_T.value) + std::log(std::log(16.0 * n));
  if (m < 10.0 * out.L_n) {
    std::ostringstream msg;
    msg << "m = " << problem.m << " is below 10 L_n = " << 10.0 * out.L_n
        << "; the risk characterization may be inaccurate";
    out.warnings.push_back(msg.str());
  }

  if (m <= out.delta_K.value + kGuardSEs * out.delta_K.se) {
    out.status = SolveStatus::NoSolution;
    out.regime = m < out.delta_K.value - kGuardSEs * out.delta_K.se ? Regime::III
                                                                     : Regime::Indeterminate;
    return out;
  }

  double r_sq = options.initial_r_sq;
  out.trace.push_back(r_sq);
  out.status = SolveStatus::MaxIterations;
  Estimate last_map{};
  double previous_step = 0.0;
  for (int t = 0; t < options.max_iter; ++t) {
    const double r = std::sqrt(r_sq);
    last_map = map.normalized_err(omega(r, ratio, sigma));
    const double next = last_map.value;
    out.trace.push_back(next);
    const double step = std::abs(std::sqrt(next) - r);
    const double change = step / std::max(r, 1e-12);
    // Distance to the fixed point is about step * q / (1 - q) for contraction q.
    const double q = previous_step > 0.0 ? std::clamp(step / previous_step, 0.0, 0.999) : 0.0;
    const double remaining = change * q / (1.0 - q);
    previous_step = step;
    r_sq = next;
    if (change < options.tol && remaining < options.tol) {
      out.status = SolveStatus::Converged;
      break;
    }
  }

  out.r_sq = r_sq;
  out.omega = omega(std::sqrt(r_sq), ratio, sigma);

  // A fixed point of a map with slope q shifts by (map error) / (1 - q).
  double slope = 0.0;
  const auto len = out.trace.size();
  if (len >= 3) {
    const double d1 = out.trace[len - 1] - out.trace[len - 2];
    const double d0 = out.trace[len - 2] - out.trace[len - 3];
    if (d0 != 0.0) slope = std::clamp(d1 / d0, 0.0, 0.99);
  }
  out.r_sq_se = last_map.se / (1.0 - slope);

  out.regime = classify_regime(m, out.delta_K, out.delta_T);

  const Estimate excess = map.normalized_lrt_excess(out.omega);
  out.r2_statistic = excess.value / (2.0 * problem.sigma2);
  out.r2_se = excess.se / (2.0 * problem.sigma2);
  out.r2_holds = out.r2_statistic < 1.0;
  out.r2_verified = out.r2_statistic + kGuardSEs * out.r2_se < 1.0;

  out.lower_bound = out.delta_K.value / (m - out.delta_K.value);
  out.upper_bound = m > out.delta_T.value ? out.delta_T.value / (m - out.delta_T.value)
                                          : std::numeric_limits<double>::infinity();

  if (out.status == SolveStatus::MaxIterations) {
    std::ostringstream msg;
    msg << "fixed-point iteration stopped after " << options.max_iter << " iterations";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double vanishing_risk_shortcut(const FixedPointProblem& problem) {
  validate(problem);
  const RiskMap map(problem);
  const double ratio = static_cast<double>(problem.m) / static_cast<double>(problem.n());
  if (static_cast<double>(problem.m) <= map.delta_K().value)
    throw NoSolutionError("m does not exceed delta_K; the fixed point does not exist");
  return map.normalized_err(omega(0.0, ratio, std::sqrt(problem.sigma2))).value;
}

double nnls_solve(const DiscretePrior& prior, double ratio, double sigma, double tol) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(ratio > 0.5))
    throw NoSolutionError("the orthant fixed point exists only for m/n > 1/2");
  double r_sq = 0.0;
  for (int t = 0; t < kNnlsMaxIterations; ++t) {
    const double w = omega(std::sqrt(r_sq), ratio, sigma);
    const double next = w * w * prior_G(prior, w);
    const double r = std::sqrt(r_sq);
    const double change = std::abs(std::sqrt(next) - r);
    r_sq = next;
    if (change < tol * std::max(r, 1e-300)) return r_sq;
  }
  throw NoSolutionError("orthant fixed-point iteration did not converge");
}

R2Check nnls_check_R2(const DiscretePrior& prior, double r_sq, double ratio, double sigma) {
  if (!(r_sq >= 0.0)) throw DomainError("r^2 must be nonnegative");
  const double w = omega(std::sqrt(r_sq), ratio, sigma);
  R2Check out;
  out.statistic = w * w * prior_H(prior, w) / (sigma * sigma);
  out.holds = out.statistic < 1.0;
  return out;
}

}  // namespace riskfix
