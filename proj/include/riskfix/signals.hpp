#pragma once

#include <string>
#include <string_view>

#include "riskfix/constraint_set.hpp"
#include "riskfix/kernels.hpp"

namespace riskfix {

/// Signal presets, with f evaluated at i/n for i = 1..n:
///   zero, constant(u), linear (f(x) = x), quadratic (f(x) = x^2),
///   piecewise_constant(k) (k equal blocks at levels 0, 1/k, ..., (k-1)/k),
///   atoms=v1:w1,... (a prior laid out deterministically, see prior_to_vector),
///   file:<path> or any other text naming a readable file.
/// Arguments may be written "constant(5)" or "constant:5".
Vector make_signal(std::string_view spec, Eigen::Index n);

/// True for "atoms=..." prior specs.
bool is_prior_spec(std::string_view spec);

/// Quantile layout of a prior over n coordinates: coordinate i (0-based)
/// takes the atom whose cumulative-weight interval contains (i + 1/2) / n.
/// Atoms are laid out in increasing order of value, so the result is
/// nondecreasing and nonnegative.
Vector prior_to_vector(const DiscretePrior& prior, Eigen::Index n);

/// Whitespace-separated numbers. Throws IoError when unreadable and
/// ConfigError on a malformed token.
Vector read_vector_file(const std::string& path);

/// Builds a constraint set from a kind name; `radius` is used by l1_ball and
/// `subspace_dim` by subspace (a coordinate subspace).
ConstraintSet make_constraint(std::string_view kind, Eigen::Index n, double radius = 1.0,
                              Eigen::Index subspace_dim = 1);

}  // namespace riskfix
