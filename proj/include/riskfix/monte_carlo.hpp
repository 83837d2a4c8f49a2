#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace riskfix {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A Monte Carlo mean with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct MonteCarloConfig {
  int samples = 10000;
  std::uint64_t seed = 0;
  /// When false, estimators that have a closed form still run the simulation.
  bool allow_closed_form = true;
};

/// Deterministic child seed for stream `index` under `base_seed` (splitmix64
/// finalizer applied twice so that neighbouring indices decorrelate).
std::uint64_t child_seed(std::uint64_t base_seed, std::uint64_t index);

/// Generator for stream `index`.
std::mt19937_64 make_engine(std::uint64_t base_seed, std::uint64_t index);

/// n i.i.d. N(0,1) draws.
Vector gaussian_vector(std::mt19937_64& engine, Eigen::Index n);

/// Fixed set of standard Gaussian draws, one column per sample. Column j is
/// generated from child stream j, so the bank is reproducible from
/// (seed, samples, n) alone and can be reused across noise levels.
class GaussianBank {
 public:
  GaussianBank(Eigen::Index n, int samples, std::uint64_t seed);

  [[nodiscard]] Eigen::Index dimension() const { return draws_.rows(); }
  [[nodiscard]] int samples() const { return static_cast<int>(draws_.cols()); }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] auto column(int j) const { return draws_.col(j); }

 private:
  Matrix draws_;
  std::uint64_t seed_;
};

/// Sample mean and standard error of the mean.
Estimate summarize(std::span<const double> values);

/// Upper bound on worker threads used by parallel_for (0 = hardware default).
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks,
/// callers write into per-index slots and reduce afterwards in index order,
/// so results never depend on scheduling. Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace riskfix
