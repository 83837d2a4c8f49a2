#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "riskfix/errors.hpp"
#include "riskfix/kernels.hpp"

using namespace riskfix;

TEST(Normal, Examples) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_pdf(0.0), 0.3989422804014327, 1e-16);
  EXPECT_NEAR(normal_cdf(1.0) - normal_cdf(-1.0), 0.6826894921370859, 1e-14);
}

TEST(Normal, MatchesQuadratureOracle) {
  for (double x = -8.0; x <= 8.0; x += 0.173) {
    EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf_quadrature(x), 1e-12) << x;
  }
  EXPECT_NEAR(oracle::normal_cdf_quadrature(1.0) - oracle::normal_cdf_quadrature(-1.0),
              0.6826894921370859, 1e-14);
}

TEST(Kernels, Examples) {
  EXPECT_DOUBLE_EQ(kernel_G(0.0), 0.5);
  EXPECT_DOUBLE_EQ(kernel_H(0.0), 0.0);
  EXPECT_GE(kernel_G(40.0), 1.0 - 1e-12);
  EXPECT_LE(kernel_G(40.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_G(100.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_H(100.0), 0.0);
  EXPECT_THROW(kernel_G(-0.1), DomainError);
  EXPECT_THROW(kernel_H(-1e-9), DomainError);
}

TEST(Kernels, MatchProjectionRiskQuadrature) {
  for (double x : {0.0, 0.3, 1.0, 2.0, 3.5, 6.0}) {
    EXPECT_NEAR(kernel_G(x), oracle::kernel_G(x), 1e-10) << x;
    EXPECT_NEAR(kernel_H(x), oracle::kernel_H(x), 1e-10) << x;
  }
}

TEST(KernelProperties, GridInvariants) {
  constexpr int kPoints = 10000;
  double sup_h = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    const double x = 10.0 * k / (kPoints - 1);
    const double g = kernel_G(x), h = kernel_H(x);
    ASSERT_GE(g, 0.5);
    ASSERT_LE(g, 1.0);
    ASSERT_GE(h, 0.0);
    ASSERT_NEAR(h, normal_cdf(x) - g, 1e-12);
    if (x + 1e-3 <= 10.0 && x < 7.0) ASSERT_GT(kernel_G(x + 1e-3), g) << x;
    for (double delta : {0.01, 0.1}) ASSERT_LE(kernel_G((1 + delta) * x), g * (1 + 8 * delta));
    sup_h = std::max(sup_h, h);
  }
  EXPECT_LT(sup_h, 0.13);
}

TEST(KernelProperties, ScaledKernelsNondecreasing) {
  double prev_g = 0.0, prev_h = 0.0;
  for (int k = 1; k <= 10000; ++k) {
    const double x = 10.0 * k / 10000.0;
    const double g = x * x * kernel_G(1.0 / x);
    const double h = x * x * kernel_H(1.0 / x);
    ASSERT_GE(g, prev_g - 1e-12) << x;
    ASSERT_GE(h, prev_h - 1e-12) << x;
    prev_g = g;
    prev_h = h;
  }
}

TEST(Prior, ValidationAndParsing) {
  EXPECT_THROW(DiscretePrior({{-1.0, 1.0}}), DomainError);
  EXPECT_THROW(DiscretePrior({{1.0, 0.5}}), DomainError);
  EXPECT_THROW(DiscretePrior({{1.0, 0.0}, {2.0, 1.0}}), DomainError);
  EXPECT_THROW(DiscretePrior({}), DomainError);
  const auto p = DiscretePrior::parse("atoms=0:0.5,5:0.5");
  ASSERT_EQ(p.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(p.mass_at_zero(), 0.5);
  EXPECT_DOUBLE_EQ(p.second_moment(), 12.5);
  EXPECT_EQ(DiscretePrior::parse(p.to_string()).atoms().size(), 2u);
  EXPECT_THROW(DiscretePrior::parse("atoms=0:0.5;5"), DomainError);
}

TEST(Prior, Expectations) {
  const auto zero = DiscretePrior::point_mass(0.0);
  for (double w : {0.1, 1.0, 7.0}) {
    EXPECT_DOUBLE_EQ(prior_G(zero, w), 0.5);
    EXPECT_DOUBLE_EQ(prior_H(zero, w), 0.0);
  }
  const auto mix = DiscretePrior::parse("atoms=0:0.5,5:0.5");
  EXPECT_NEAR(prior_G(mix, 5.0), 0.25 + 0.5 * oracle::kernel_G(1.0), 1e-10);
  EXPECT_THROW(prior_G(mix, 0.0), DomainError);
  EXPECT_THROW(prior_H(mix, -1.0), DomainError);
}

TEST(Psi, Examples) {
  EXPECT_NEAR(psi_sparse(1.0), 1.0, 1e-12);
  EXPECT_THROW(psi_sparse(0.0), DomainError);
  EXPECT_THROW(psi_sparse(1.5), DomainError);
  for (double g : {0.0, 0.5, 1.7, 4.0})
    EXPECT_NEAR(excess_second_moment(g), oracle::excess_second_moment(g), 1e-10);
}

TEST(Psi, MatchesGridOracleAndIsMonotone) {
  double prev = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double rho = k / 50.0;
    const double v = psi_sparse(rho);
    EXPECT_NEAR(v, oracle::psi_grid(rho), 1e-7) << rho;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(Psi, SparseDimensionBound) {
  // n psi(s/n) should sit close to, and not far above, 2 s log(n/s) + 5s/4.
  const double s = 5, n = 1000;
  const double value = n * psi_sparse(s / n);
  const double bound = 2 * s * std::log(n / s) + 1.25 * s;
  EXPECT_LE(value, bound);
  EXPECT_GE(value, 2 * s * std::log(n / s) * 0.5);
}
