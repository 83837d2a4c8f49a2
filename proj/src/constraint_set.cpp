#include "riskfix/constraint_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "riskfix/errors.hpp"

namespace riskfix {

namespace {

constexpr double kDitherScale = 1e-12;

void check_input(const ConstraintSet& set, const Vector& x) {
  if (x.size() != set.dimension()) {
    std::ostringstream msg;
    msg << "input has dimension " << x.size() << ", constraint set has " << set.dimension();
    throw DomainError(msg.str());
  }
  if (!x.allFinite()) throw DomainError("input vector contains non-finite values");
}

// Deterministic pseudo-random values in [-1, 1], a function of the index only.
Vector dither(Eigen::Index n, double scale) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint64_t z = static_cast<std::uint64_t>(i) + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    d[i] = scale * (2.0 * static_cast<double>(z >> 11) * 0x1.0p-53 - 1.0);
  }
  return d;
}

Vector dithered(const Vector& x) {
  const double scale = kDitherScale * std::max(1.0, x.cwiseAbs().maxCoeff());
  return x + dither(x.size(), scale);
}

int count_pieces(const Vector& v) {
  if (v.size() == 0) return 0;
  int pieces = 1;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] != v[i - 1]) ++pieces;
  return pieces;
}

struct Structure {
  double divergence;
  bool tie;
};

Structure orthant_structure(const Vector& x) {
  int positive = 0;
  bool tie = false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) ++positive;
    if (x[i] == 0.0) tie = true;
  }
  return {static_cast<double>(positive), tie};
}

Structure monotone_structure(const Vector& x) {
  const auto fit = isotonic_regression(x);
  return {static_cast<double>(fit.blocks), fit.tie};
}

Structure l1_structure(const Vector& x, double radius) {
  const auto n = x.size();
  const double norm1 = x.lpNorm<1>();
  if (norm1 < radius) return {static_cast<double>(n), false};
  if (norm1 == radius) return {static_cast<double>(n), true};
  const auto th = l1_ball_threshold(x, radius);
  bool tie = false;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(x[i]) == th.threshold) tie = true;
  return {static_cast<double>(th.support - 1), tie};
}

Structure structure_of(const ConstraintSet& set, const Vector& x) {
  switch (set.kind()) {
    case ConstraintKind::Orthant:
      return orthant_structure(x);
    case ConstraintKind::MonotoneCone:
      return monotone_structure(x);
    case ConstraintKind::L1Ball:
      return l1_structure(x, set.radius());
    case ConstraintKind::Subspace:
      return {static_cast<double>(set.subspace_dimension()), false};
  }
  return {0.0, false};
}

double divergence_unchecked(const ConstraintSet& set, const Vector& x) {
  const auto s = structure_of(set, x);
  if (!s.tie) return s.divergence;
  return structure_of(set, dithered(x)).divergence;
}

Vector project_point(const ConstraintSet& set, const Vector& x, int& structure) {
  switch (set.kind()) {
    case ConstraintKind::Orthant: {
      Vector p = x.cwiseMax(0.0);
      structure = static_cast<int>((p.array() > 0.0).count());
      return p;
    }
    case ConstraintKind::MonotoneCone: {
      auto fit = isotonic_regression(x);
      structure = count_pieces(fit.fit);
      return std::move(fit.fit);
    }
    case ConstraintKind::L1Ball: {
      const auto th = l1_ball_threshold(x, set.radius());
      if (th.interior) {
        structure = static_cast<int>((x.array() != 0.0).count());
        return x;
      }
      Vector p(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double shrunk = std::max(std::abs(x[i]) - th.threshold, 0.0);
        p[i] = x[i] < 0.0 ? -shrunk : shrunk;
      }
      structure = static_cast<int>((p.array() != 0.0).count());
      return p;
    }
    case ConstraintKind::Subspace: {
      structure = static_cast<int>(set.subspace_dimension());
      return set.basis() * (set.basis().transpose() * x);
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Orthant:
      return "orthant";
    case ConstraintKind::MonotoneCone:
      return "monotone_cone";
    case ConstraintKind::L1Ball:
      return "l1_ball";
    case ConstraintKind::Subspace:
      return "subspace";
  }
  return "unknown";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "orthant" || name == "nonnegative") return ConstraintKind::Orthant;
  if (name == "monotone" || name == "monotone_cone" || name == "isotonic")
    return ConstraintKind::MonotoneCone;
  if (name == "l1_ball" || name == "l1") return ConstraintKind::L1Ball;
  if (name == "subspace") return ConstraintKind::Subspace;
  throw DescriptorError("unknown constraint kind '" + std::string(name) + "'");
}

ConstraintSet ConstraintSet::orthant(Eigen::Index n) {
  if (n < 1) throw DescriptorError("orthant: dimension must be positive");
  return {ConstraintKind::Orthant, n};
}

ConstraintSet ConstraintSet::monotone_cone(Eigen::Index n) {
  if (n < 1) throw DescriptorError("monotone cone: dimension must be positive");
  return {ConstraintKind::MonotoneCone, n};
}

ConstraintSet ConstraintSet::l1_ball(Eigen::Index n, double radius) {
  if (n < 1) throw DescriptorError("l1 ball: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw DescriptorError("l1 ball: radius must be positive and finite");
  ConstraintSet set(ConstraintKind::L1Ball, n);
  set.radius_ = radius;
  return set;
}

ConstraintSet ConstraintSet::subspace(Matrix basis) {
  const auto n = basis.rows();
  const auto d = basis.cols();
  if (n < 1 || d < 1 || d > n)
    throw DescriptorError("subspace: basis must be n x d with 1 <= d <= n");
  if (!basis.allFinite()) throw DescriptorError("subspace: basis has non-finite entries");
  const Matrix gram = basis.transpose() * basis;
  const double deviation = (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (deviation > 1e-10)
    throw DescriptorError("subspace: basis columns are not orthonormal");
  ConstraintSet set(ConstraintKind::Subspace, n);
  set.basis_ = std::move(basis);
  return set;
}

ConstraintSet ConstraintSet::coordinate_subspace(Eigen::Index n, Eigen::Index d) {
  if (n < 1 || d < 1 || d > n)
    throw DescriptorError("subspace: need 1 <= d <= n");
  return subspace(Matrix::Identity(n, d));
}

bool ConstraintSet::contains(const Vector& x, double tol) const {
  if (x.size() != n_ || !x.allFinite()) return false;
  switch (kind_) {
    case ConstraintKind::Orthant:
      return x.minCoeff() >= -tol;
    case ConstraintKind::MonotoneCone:
      for (Eigen::Index i = 1; i < n_; ++i)
        if (x[i] < x[i - 1] - tol) return false;
      return true;
    case ConstraintKind::L1Ball:
      return x.lpNorm<1>() <= radius_ + tol;
    case ConstraintKind::Subspace: {
      const Vector residual = x - basis_ * (basis_.transpose() * x);
      return residual.norm() <= tol * std::max(1.0, x.norm());
    }
  }
  return false;
}

std::string ConstraintSet::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << "(n=" << n_;
  if (kind_ == ConstraintKind::L1Ball) out << ",radius=" << radius_;
  if (kind_ == ConstraintKind::Subspace) out << ",d=" << basis_.cols();
  out << ")";
  return out.str();
}

IsotonicFit isotonic_regression(const Vector& y) {
  const auto n = y.size();
  // Stack of pooled blocks: (sum, count). Pool while the previous block mean
  // strictly exceeds the current one.
  std::vector<double> sums;
  std::vector<Eigen::Index> counts;
  sums.reserve(static_cast<std::size_t>(n));
  counts.reserve(static_cast<std::size_t>(n));
  bool tie = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    sums.push_back(y[i]);
    counts.push_back(1);
    while (sums.size() > 1) {
      const auto last = sums.size() - 1;
      // Compare means without division: s1/c1 vs s2/c2.
      const double lhs = sums[last - 1] * static_cast<double>(counts[last]);
      const double rhs = sums[last] * static_cast<double>(counts[last - 1]);
      if (lhs == rhs) tie = true;
      if (lhs <= rhs) break;
      sums[last - 1] += sums[last];
      counts[last - 1] += counts[last];
      sums.pop_back();
      counts.pop_back();
    }
  }
  IsotonicFit out;
  out.fit.resize(n);
  out.blocks = static_cast<int>(sums.size());
  out.tie = tie;
  Eigen::Index pos = 0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    const double mean = sums[b] / static_cast<double>(counts[b]);
    for (Eigen::Index k = 0; k < counts[b]; ++k) out.fit[pos++] = mean;
  }
  return out;
}

L1Threshold l1_ball_threshold(const Vector& x, double radius) {
  L1Threshold out;
  const double norm1 = x.lpNorm<1>();
  if (norm1 <= radius) {
    out.support = static_cast<int>((x.array() != 0.0).count());
    return out;
  }
  std::vector<double> a(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(a.begin(), a.end(), std::greater<>());

  // Largest k with a_k > (S_k - radius) / k.
  double partial = 0.0;
  double best_sum = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    partial += a[j];
    if (a[j] * static_cast<double>(j + 1) > partial - radius) {
      k = j + 1;
      best_sum = partial;
    }
  }
  out.interior = false;
  out.threshold = (best_sum - radius) / static_cast<double>(k);
  out.support = static_cast<int>(k);
  return out;
}

ProjectionResult project(const ConstraintSet& set, const Vector& x) {
  check_input(set, x);
  ProjectionResult out;
  if (set.kind() == ConstraintKind::MonotoneCone) {
    auto fit = isotonic_regression(x);
    out.structure = count_pieces(fit.fit);
    out.divergence = fit.tie ? monotone_structure(dithered(x)).divergence
                             : static_cast<double>(fit.blocks);
    out.point = std::move(fit.fit);
    return out;
  }
  out.point = project_point(set, x, out.structure);
  out.divergence = divergence_unchecked(set, x);
  return out;
}

Vector project_onto(const ConstraintSet& set, const Vector& x) {
  check_input(set, x);
  int ignored = 0;
  return project_point(set, x, ignored);
}

double divergence(const ConstraintSet& set, const Vector& x) {
  check_input(set, x);
  return divergence_unchecked(set, x);
}

Vector polar_project(const ConstraintSet& set, const Vector& x) {
  if (!set.is_cone())
    throw UnsupportedKindError("polar projection requires a cone; got " + set.describe());
  check_input(set, x);
  int ignored = 0;
  return x - project_point(set, x, ignored);
}

}  // namespace riskfix
