#pragma once

#include <string>
#include <vector>

namespace riskfix {

double normal_pdf(double x);
/// Standard normal CDF via erfc; absolute error well below 1e-12.
double normal_cdf(double x);

/// G(x) = Phi(x) - x phi(x) + x^2 Phi(-x), x >= 0. Returns 1 for x > 40.
/// Per coordinate, E err(sigma) / sigma^2 of the orthant projection at a
/// coordinate mean of x * sigma.
double kernel_G(double x);
/// H(x) = Phi(x) - G(x) = x phi(x) - x^2 Phi(-x), x >= 0. Returns 0 for x > 40.
double kernel_H(double x);

/// E(|Z| - gamma)_+^2 for Z ~ N(0,1).
double excess_second_moment(double gamma);

/// Finite nonnegative distribution for i.i.d. signal coordinates.
class DiscretePrior {
 public:
  struct Atom {
    double value;
    double weight;
  };

  /// Throws DomainError unless values >= 0, weights > 0 and sum to 1 (1e-12).
  explicit DiscretePrior(std::vector<Atom> atoms);

  static DiscretePrior point_mass(double value);

  /// Parses "v1:w1,v2:w2,..." (an optional "atoms=" prefix is accepted).
  static DiscretePrior parse(const std::string& text);

  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  /// P(U = 0).
  [[nodiscard]] double mass_at_zero() const;
  [[nodiscard]] double second_moment() const;
  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Atom> atoms_;
};

/// E G(U / omega); omega must be positive.
double prior_G(const DiscretePrior& prior, double omega);
/// E H(U / omega); omega must be positive.
double prior_H(const DiscretePrior& prior, double omega);

/// psi(rho) = inf_{gamma >= 0} rho (1 + gamma^2) + (1 - rho) E(|Z| - gamma)_+^2,
/// minimized by golden-section search on [0, 20]. Defined for 0 < rho <= 1.
double psi_sparse(double rho);

}  // namespace riskfix
