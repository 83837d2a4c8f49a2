#pragma once

#include <random>

#include "riskfix/constraint_set.hpp"
#include "riskfix/monte_carlo.hpp"

namespace testing_support {

using riskfix::ConstraintKind;
using riskfix::ConstraintSet;
using riskfix::Matrix;
using riskfix::Vector;

inline Vector gaussian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// A random orthonormal basis of a d-dimensional subspace of R^n.
inline Matrix random_basis(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  Matrix A(n, d);
  for (Eigen::Index j = 0; j < d; ++j) A.col(j) = gaussian(rng, n);
  Eigen::HouseholderQR<Matrix> qr(A);
  return qr.householderQ() * Matrix::Identity(n, d);
}

inline ConstraintSet random_set(ConstraintKind kind, Eigen::Index n, std::mt19937_64& rng) {
  switch (kind) {
    case ConstraintKind::Orthant:
      return ConstraintSet::orthant(n);
    case ConstraintKind::MonotoneCone:
      return ConstraintSet::monotone_cone(n);
    case ConstraintKind::L1Ball: {
      std::uniform_real_distribution<double> radius(0.5, 2.0 * std::sqrt(static_cast<double>(n)));
      return ConstraintSet::l1_ball(n, radius(rng));
    }
    case ConstraintKind::Subspace: {
      std::uniform_int_distribution<Eigen::Index> dim(1, n);
      return ConstraintSet::subspace(random_basis(rng, n, dim(rng)));
    }
  }
  return ConstraintSet::orthant(n);
}

// A point of K: the projection of a wide random vector.
inline Vector random_member(const ConstraintSet& set, std::mt19937_64& rng, double scale = 3.0) {
  return riskfix::project_onto(set, gaussian(rng, set.dimension(), scale));
}

inline const ConstraintKind kAllKinds[] = {ConstraintKind::Orthant, ConstraintKind::MonotoneCone,
                                           ConstraintKind::L1Ball, ConstraintKind::Subspace};

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing_support
