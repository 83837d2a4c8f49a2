#include "riskfix/linear_experiments.hpp"

#include <cmath>
#include <random>

#include "riskfix/errors.hpp"

namespace riskfix {

namespace {

constexpr double kBlowUpFactor = 1e6;
constexpr double kAuditSlack = 1e-4;
constexpr int kAuditStride = 20;

double mean_squared_residual(const DesignInstance& inst, const Vector& mu) {
  return (inst.Y - inst.X * mu).squaredNorm() / static_cast<double>(inst.Y.size());
}

void check_compatible(const ConstraintSet& set, const DesignInstance& inst) {
  if (inst.X.cols() != set.dimension() || inst.mu0.size() != set.dimension())
    throw DomainError("design instance dimension does not match " + set.describe());
}

SolverResult finish(const DesignInstance& inst, Vector mu, int iterations, SolverKind solver,
                    bool converged) {
  SolverResult out;
  out.objective = mean_squared_residual(inst, mu);
  out.risk = (mu - inst.mu0).squaredNorm() / static_cast<double>(mu.size());
  out.mu_hat = std::move(mu);
  out.iterations = iterations;
  out.solver = solver;
  out.converged = converged;
  return out;
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::Gaussian ? "gaussian" : "rademacher";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "rademacher") return NoiseKind::Rademacher;
  throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

std::string_view to_string(SolverKind kind) { return kind == SolverKind::Amp ? "amp" : "pgd"; }

SolverChoice parse_solver_choice(std::string_view name) {
  if (name == "amp") return SolverChoice::Amp;
  if (name == "pgd") return SolverChoice::Pgd;
  if (name == "auto") return SolverChoice::Auto;
  throw ConfigError("unknown solver '" + std::string(name) + "' (expected amp, pgd or auto)");
}

DesignInstance generate_instance(int m, const Vector& mu0, double sigma, NoiseKind noise,
                                 std::uint64_t seed) {
  const auto n = mu0.size();
  if (m < 1 || n < 1) throw DomainError("generate_instance: m and n must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("generate_instance: the noise variance must be positive and finite");
  if (!mu0.allFinite()) throw DomainError("generate_instance: mu0 must be finite");

  auto engine = make_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  DesignInstance inst;
  inst.X.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) inst.X(i, j) = scale * normal(engine);

  inst.xi.resize(m);
  if (noise == NoiseKind::Gaussian) {
    for (Eigen::Index i = 0; i < m; ++i) inst.xi[i] = sigma * normal(engine);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Eigen::Index i = 0; i < m; ++i) inst.xi[i] = coin(engine) ? sigma : -sigma;
  }
  inst.mu0 = mu0;
  inst.Y = inst.X * mu0 + inst.xi;
  inst.sigma = sigma;
  inst.seed = seed;
  return inst;
}

double spectral_norm(const Matrix& X, int iterations) {
  Vector v = Vector::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Vector w = X.transpose() * (X * v);
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

SolverResult pgd_solve(const ConstraintSet& set, const DesignInstance& inst,
                       const PgdOptions& options) {
  check_compatible(set, inst);
  const double m = static_cast<double>(inst.X.rows());
  const double smax = spectral_norm(inst.X);
  const double step = m / (smax * smax + 1e-12);

  Vector mu = Vector::Zero(set.dimension());
  Vector residual = inst.Y - inst.X * mu;
  double f = residual.squaredNorm() / (2.0 * m);
  std::vector<double> trace;
  if (options.record_objective) trace.push_back(2.0 * f);

  bool converged = false;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Vector gradient = -(inst.X.transpose() * residual) / m;
    Vector next = project_onto(set, mu - step * gradient);
    Vector next_residual = inst.Y - inst.X * next;
    const double f_next = next_residual.squaredNorm() / (2.0 * m);
    if (options.record_objective) trace.push_back(2.0 * f_next);
    // f - f_next without cancellation: (r + r_next) . X (next - mu) / 2m.
    const double decrease = (residual + next_residual).dot(inst.X * (next - mu)) / (2.0 * m);
    if (decrease >= 0.0) {
      mu = std::move(next);
      residual = std::move(next_residual);
      f = f_next;
    }
    if (decrease <= options.tol * f) {
      converged = true;
      ++it;
      break;
    }
  }
  auto out = finish(inst, std::move(mu), it, SolverKind::Pgd, converged);
  out.objective_trace = std::move(trace);
  return out;
}

SolverResult amp_solve(const ConstraintSet& set, const DesignInstance& inst,
                       const AmpOptions& options) {
  check_compatible(set, inst);
  const auto m = inst.X.rows();
  const auto n = inst.X.cols();
  const double ratio = static_cast<double>(n) / static_cast<double>(m);
  const double blow_up =
      kBlowUpFactor * (inst.mu0.norm() + std::sqrt(static_cast<double>(n)) * inst.sigma);

  Vector mu = Vector::Zero(n);
  Vector r = inst.Y;
  for (int t = 0; t < options.max_iter; ++t) {
    const Vector pseudo_data = ratio * (inst.X.transpose() * r) + mu;
    auto projection = project(set, pseudo_data);
    const double onsager = projection.divergence / static_cast<double>(m);
    r = inst.Y - inst.X * projection.point + onsager * r;

    const double change = (projection.point - mu).norm() / std::max(mu.norm(), 1.0);
    mu = std::move(projection.point);
    if (!mu.allFinite() || mu.norm() > blow_up || !r.allFinite()) {
      return pgd_solve(set, inst);
    }
    if (change < options.tol) return finish(inst, std::move(mu), t + 1, SolverKind::Amp, true);
  }
  return finish(inst, std::move(mu), options.max_iter, SolverKind::Amp, false);
}

EmpiricalRisk empirical_risk(const ConstraintSet& set, const Vector& mu0, int m, double sigma,
                             int replicates, std::uint64_t base_seed, SolverChoice choice,
                             NoiseKind noise) {
  if (replicates < 10) throw DomainError("empirical_risk needs at least 10 replicates");
  if (mu0.size() != set.dimension()) throw DomainError("mu0 has the wrong dimension");
  if (!set.contains(mu0, 1e-8)) throw DomainError("mu0 is not in " + set.describe());

  EmpiricalRisk out;
  out.replicates.resize(static_cast<std::size_t>(replicates));
  parallel_for(out.replicates.size(), [&](std::size_t i) {
    const auto inst = generate_instance(m, mu0, sigma, noise, child_seed(base_seed, i));
    SolverResult result;
    switch (choice) {
      case SolverChoice::Amp:
        result = amp_solve(set, inst);
        break;
      case SolverChoice::Pgd:
        result = pgd_solve(set, inst);
        break;
      case SolverChoice::Auto:
        result = amp_solve(set, inst);
        if (!result.converged) result = pgd_solve(set, inst);
        break;
    }
    auto& rep = out.replicates[i];
    rep.replicate_id = static_cast<int>(i);
    rep.risk = result.risk;
    rep.objective = result.objective;
    rep.iterations = result.iterations;
    rep.solver = result.solver;
    rep.converged = result.converged;
    if (i % kAuditStride == 0 && result.solver == SolverKind::Amp) {
      const auto reference = pgd_solve(set, inst);
      rep.audit_flag =
          result.objective > reference.objective + kAuditSlack * (1.0 + reference.objective);
    }
  });

  std::vector<double> risks;
  risks.reserve(out.replicates.size());
  for (const auto& rep : out.replicates) {
    risks.push_back(rep.risk);
    if (rep.replicate_id % kAuditStride == 0 && rep.solver == SolverKind::Amp) ++out.audited;
    if (rep.audit_flag) ++out.audit_failures;
  }
  const auto summary = summarize(risks);
  out.mean = summary.value;
  out.se = summary.se;
  return out;
}

}  // namespace riskfix
