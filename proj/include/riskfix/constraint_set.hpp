#pragma once

#include <string>
#include <string_view>

#include "riskfix/monte_carlo.hpp"

namespace riskfix {

enum class ConstraintKind { Orthant, MonotoneCone, L1Ball, Subspace };

std::string_view to_string(ConstraintKind kind);

/// Accepts "orthant", "monotone" / "monotone_cone" / "isotonic", "l1_ball" /
/// "l1", "subspace". Throws DescriptorError otherwise.
ConstraintKind parse_constraint_kind(std::string_view name);

/// A closed convex set K in R^n with a cheap exact Euclidean projection.
///
/// Instances are only created through the named constructors, which check
/// the descriptor invariants, so every ConstraintSet in circulation is valid.
class ConstraintSet {
 public:
  /// {x : x_i >= 0}
  static ConstraintSet orthant(Eigen::Index n);
  /// {x : x_1 <= x_2 <= ... <= x_n}
  static ConstraintSet monotone_cone(Eigen::Index n);
  /// {x : ||x||_1 <= radius}
  static ConstraintSet l1_ball(Eigen::Index n, double radius);
  /// Column span of `basis`, whose columns must be orthonormal (1e-10).
  static ConstraintSet subspace(Matrix basis);
  /// span{e_1, ..., e_d}.
  static ConstraintSet coordinate_subspace(Eigen::Index n, Eigen::Index d);

  [[nodiscard]] ConstraintKind kind() const { return kind_; }
  [[nodiscard]] Eigen::Index dimension() const { return n_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] const Matrix& basis() const { return basis_; }
  /// d for subspaces, 0 otherwise.
  [[nodiscard]] Eigen::Index subspace_dimension() const { return basis_.cols(); }
  [[nodiscard]] bool is_cone() const { return kind_ != ConstraintKind::L1Ball; }

  /// Membership up to an absolute tolerance (relative to max(1, ||x||) for
  /// the subspace distance).
  [[nodiscard]] bool contains(const Vector& x, double tol = 1e-8) const;

  /// Human-readable descriptor, e.g. "l1_ball(n=50,radius=3)".
  [[nodiscard]] std::string describe() const;

 private:
  ConstraintSet(ConstraintKind kind, Eigen::Index n) : kind_(kind), n_(n) {}

  ConstraintKind kind_;
  Eigen::Index n_;
  double radius_ = 0.0;
  Matrix basis_;
};

struct ProjectionResult {
  Vector point;
  /// Trace of the Jacobian of the projection at the input (a.e. defined).
  double divergence = 0.0;
  /// orthant: positive output coordinates; monotone cone: constant pieces;
  /// l1 ball: nonzero output coordinates; subspace: d.
  int structure = 0;
};

/// Euclidean projection onto K together with its divergence.
/// Throws DomainError for non-finite input or a dimension mismatch.
ProjectionResult project(const ConstraintSet& set, const Vector& x);

/// Projection point only; skips the divergence computation.
Vector project_onto(const ConstraintSet& set, const Vector& x);

/// Divergence of the projection map at x. Inputs on the measure-zero
/// non-differentiability set (exact ties) are moved off it by a deterministic
/// dither of relative size 1e-12 before the structure is counted.
double divergence(const ConstraintSet& set, const Vector& x);

/// Projection onto the polar cone, x - project(K, x). Cones only.
Vector polar_project(const ConstraintSet& set, const Vector& x);

// Building blocks, exposed for testing and reuse.

struct IsotonicFit {
  Vector fit;
  /// Number of pooled blocks produced by the pool-adjacent-violators pass.
  int blocks = 0;
  /// True if some pooling decision compared two exactly equal block means.
  bool tie = false;
};

/// Least-squares nondecreasing fit (pool adjacent violators, O(n)).
IsotonicFit isotonic_regression(const Vector& y);

struct L1Threshold {
  /// The soft-threshold level mu(x) > 0; zero when x is inside the ball.
  double threshold = 0.0;
  /// Number of coordinates with |x_i| > threshold.
  int support = 0;
  bool interior = true;
};

/// Solves sum_i (|x_i| - mu)_+ = radius for mu by sorting |x| (O(n log n)).
L1Threshold l1_ball_threshold(const Vector& x, double radius);

// Statistical dimensions.

/// delta_K, the high-noise limit of E||Pi_K(sigma h)||^2 / sigma^2.
/// Cones use E||Pi_K(h)||^2 (closed form n/2 for the orthant and d for a
/// subspace when mc.allow_closed_form); the l1 ball doubles sigma from 1.
Estimate statistical_dimension(const ConstraintSet& set, const MonteCarloConfig& mc);

/// delta of the tangent cone T_K(mu0), the low-noise limit of
/// E err(sigma) / sigma^2, estimated by halving sigma from 1e-2. The orthant
/// uses n - z/2 with z the number of zero coordinates of mu0.
/// Throws DomainError when mu0 is not in K (tolerance 1e-8).
Estimate tangent_dimension(const ConstraintSet& set, const Vector& mu0,
                           const MonteCarloConfig& mc);

}  // namespace riskfix
