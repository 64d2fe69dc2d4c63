#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "cpce/distributions.hpp"
#include "cpce/errors.hpp"
#include "oracles.hpp"

using namespace cpce;

TEST(StdNormal, CdfAtZeroIsHalf) { EXPECT_DOUBLE_EQ(std_normal_cdf(0.0), 0.5); }

TEST(StdNormal, CdfAtQuantileFactor) { EXPECT_NEAR(std_normal_cdf(2.326), 0.99, 1e-3); }

TEST(StdNormal, CdfMatchesIntegratedDensity) {
  const double integral =
      oracle::integrate([](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }, -40.0, 1.0);
  EXPECT_NEAR(std_normal_cdf(1.0), integral, 1e-12);
  EXPECT_NEAR(std_normal_cdf(1.0), 0.8413447, 1e-6);
}

TEST(StdNormal, CdfSymmetry) {
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    EXPECT_NEAR(std_normal_cdf(-x), 1.0 - std_normal_cdf(x), 1e-15) << x;
  }
}

TEST(StdNormal, InverseAtCentreAndQuantileFactor) {
  EXPECT_DOUBLE_EQ(std_normal_inv_cdf(0.5), 0.0);
  EXPECT_NEAR(std_normal_inv_cdf(0.99), 2.326, 1e-3);
  EXPECT_NEAR(std_normal_inv_cdf(0.01), -2.326, 1e-3);
}

TEST(StdNormal, InverseMatchesBisection) {
  const double p = 0.8413447;
  const double root = oracle::bisect([](double x) { return oracle::normal_cdf(x); }, p, -10.0, 10.0);
  EXPECT_NEAR(std_normal_inv_cdf(p), root, 1e-9);
  EXPECT_NEAR(std_normal_inv_cdf(p), 1.0, 1e-5);
}

TEST(StdNormal, InverseRejectsBoundary) {
  EXPECT_THROW(std_normal_inv_cdf(0.0), DomainError);
  EXPECT_THROW(std_normal_inv_cdf(1.0), DomainError);
  EXPECT_THROW(std_normal_inv_cdf(-0.1), DomainError);
  EXPECT_THROW(std_normal_inv_cdf(std::nan("")), DomainError);
}

TEST(StdNormal, MutuallyInverseInProbabilitySpace) {
  for (double lp = -8.0; lp <= -0.30103; lp += 0.05) {
    const double p = std::pow(10.0, lp);
    EXPECT_NEAR(std_normal_cdf(std_normal_inv_cdf(p)), p, 1e-9 * std::max(p, 1e-3)) << p;
    EXPECT_NEAR(std_normal_cdf(std_normal_inv_cdf(1.0 - p)), 1.0 - p, 1e-9) << p;
  }
}

TEST(StdNormal, InverseAgreesWithBoostQuantile) {
  for (double p : {1e-12, 1e-8, 1e-4, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 1 - 1e-8}) {
    EXPECT_NEAR(std_normal_inv_cdf(p), oracle::normal_quantile(p), 1e-9 * std::max(1.0, std::fabs(oracle::normal_quantile(p))))
        << p;
  }
}

TEST(Marginal, SymmetricCdfValues) {
  EXPECT_NEAR(Marginal::beta(2, 2, 0, 1).cdf(0.5), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(Marginal::normal(10, 2).cdf(10), 0.5);
  EXPECT_NEAR(Marginal::uniform(-1, 3).cdf(1.0), 0.5, 1e-15);
}

TEST(Marginal, BetaCdfMatchesIntegratedDensity) {
  const Marginal m = Marginal::beta(2, 5, 0, 1);
  const double integral = oracle::integrate([](double t) { return oracle::beta_pdf(2, 5, t); }, 0.0, 0.2);
  EXPECT_NEAR(m.cdf(0.2), integral, 1e-8);
}

TEST(Marginal, ScaledBetaCdfMatchesIntegratedDensity) {
  const Marginal m = Marginal::beta(5, 2, -10, 40);
  for (double x : {-5.0, 10.0, 25.0, 38.0}) {
    const double integral =
        oracle::integrate([](double t) { return oracle::beta_pdf(5, 2, (t + 10.0) / 50.0) / 50.0; }, -10.0, x);
    EXPECT_NEAR(m.cdf(x), integral, 1e-10) << x;
  }
}

TEST(Marginal, IncompleteBetaMatchesQuadrature) {
  for (double a : {0.5, 1.0, 2.0, 7.5}) {
    for (double b : {0.7, 2.0, 5.0}) {
      for (double x : {0.05, 0.3, 0.5, 0.9}) {
        // t = u^2 removes the x^(a-1) endpoint singularity for a < 1.
        const double ref =
            oracle::integrate([&](double u) { return 2.0 * u * oracle::beta_pdf(a, b, u * u); }, 0.0, std::sqrt(x));
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), ref, 1e-9) << a << " " << b << " " << x;
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12);
      }
    }
  }
}

TEST(Marginal, CdfClampsOutsideSupportAndPdfVanishes) {
  const Marginal b = Marginal::beta(2, 3, 1, 4);
  EXPECT_EQ(b.cdf(0.0), 0.0);
  EXPECT_EQ(b.cdf(1.0), 0.0);
  EXPECT_EQ(b.cdf(4.0), 1.0);
  EXPECT_EQ(b.cdf(9.0), 1.0);
  EXPECT_EQ(b.pdf(0.5), 0.0);
  EXPECT_EQ(b.pdf(4.5), 0.0);
  const Marginal u = Marginal::uniform(2, 3);
  EXPECT_EQ(u.cdf(1.0), 0.0);
  EXPECT_EQ(u.cdf(3.5), 1.0);
  EXPECT_EQ(u.pdf(3.5), 0.0);
}

TEST(Marginal, InverseRejectsBoundaryProbabilities) {
  for (const Marginal& m : {Marginal::normal(0, 1), Marginal::beta(2, 2), Marginal::uniform(0, 1)}) {
    EXPECT_THROW(m.inv_cdf(0.0), DomainError);
    EXPECT_THROW(m.inv_cdf(1.0), DomainError);
  }
}

TEST(Marginal, InvalidParametersAreRejected) {
  EXPECT_THROW(Marginal::normal(0, 0), ParameterError);
  EXPECT_THROW(Marginal::normal(0, -1), ParameterError);
  EXPECT_THROW(Marginal::beta(0, 1), ParameterError);
  EXPECT_THROW(Marginal::beta(1, -2), ParameterError);
  EXPECT_THROW(Marginal::beta(2, 2, 1, 1), ParameterError);
  EXPECT_THROW(Marginal::uniform(3, 2), ParameterError);
}

class MarginalFamilies : public ::testing::TestWithParam<Marginal> {};

TEST_P(MarginalFamilies, InverseCdfRoundTrip) {
  const Marginal& m = GetParam();
  for (int i = 0; i < 1000; ++i) {
    // Quasi-uniform probabilities in (1e-6, 1 - 1e-6).
    const double p = 1e-6 + (1.0 - 2e-6) * std::fmod(0.5 + i * 0.6180339887498949, 1.0);
    const double x = m.inv_cdf(p);
    EXPECT_NEAR(m.cdf(x), p, 1e-8) << m.describe() << " p=" << p;
    EXPECT_GE(x, m.support_lower());
    EXPECT_LE(x, m.support_upper());
  }
}

TEST_P(MarginalFamilies, CdfOfInverseIsIdentityOnInterior) {
  const Marginal& m = GetParam();
  for (double p = 0.001; p < 1.0; p += 0.0173) {
    const double x = m.inv_cdf(p);
    EXPECT_NEAR(m.inv_cdf(m.cdf(x)), x, 1e-10 * std::max(1.0, std::fabs(x))) << m.describe();
  }
}

TEST_P(MarginalFamilies, CdfIsMonotone) {
  const Marginal& m = GetParam();
  const double lo = std::isfinite(m.support_lower()) ? m.support_lower() : m.mean() - 10 * std::sqrt(m.variance());
  const double hi = std::isfinite(m.support_upper()) ? m.support_upper() : m.mean() + 10 * std::sqrt(m.variance());
  double prev = m.cdf(lo);
  for (int i = 1; i <= 2000; ++i) {
    const double v = m.cdf(lo + (hi - lo) * i / 2000.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(m.cdf(lo), 0.0, 1e-15);
  EXPECT_NEAR(m.cdf(hi), 1.0, 1e-15);
}

TEST_P(MarginalFamilies, DensityIntegratesToOne) {
  const Marginal& m = GetParam();
  const double lo = std::isfinite(m.support_lower()) ? m.support_lower() : -INFINITY;
  const double hi = std::isfinite(m.support_upper()) ? m.support_upper() : INFINITY;
  EXPECT_NEAR(oracle::integrate([&](double x) { return m.pdf(x); }, lo, hi), 1.0, 1e-8) << m.describe();
}

TEST_P(MarginalFamilies, DensityIsDerivativeOfCdf) {
  const Marginal& m = GetParam();
  for (double p = 0.02; p < 0.99; p += 0.0321) {
    const double x = m.inv_cdf(p);
    const double h = 1e-5 * std::max(1.0, std::sqrt(m.variance()));
    const double fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
    EXPECT_NEAR(fd, m.pdf(x), 1e-4 * m.pdf(x)) << m.describe() << " x=" << x;
  }
}

TEST_P(MarginalFamilies, MeanAndVarianceMatchQuadrature) {
  const Marginal& m = GetParam();
  const double lo = std::isfinite(m.support_lower()) ? m.support_lower() : -INFINITY;
  const double hi = std::isfinite(m.support_upper()) ? m.support_upper() : INFINITY;
  const double mean = oracle::integrate([&](double x) { return x * m.pdf(x); }, lo, hi);
  const double second = oracle::integrate([&](double x) { return x * x * m.pdf(x); }, lo, hi);
  EXPECT_NEAR(m.mean(), mean, 1e-9 * std::max(1.0, std::fabs(mean)));
  EXPECT_NEAR(m.variance(), second - mean * mean, 1e-8 * std::max(1.0, second));
}

TEST_P(MarginalFamilies, FromLatentIsQuantileOfNormalProbability) {
  const Marginal& m = GetParam();
  for (double y = -5.0; y <= 5.0; y += 0.25) {
    const double expected = m.inv_cdf(oracle::normal_cdf(y));
    EXPECT_NEAR(m.from_latent(y), expected, 1e-9 * std::max(1.0, std::fabs(expected))) << m.describe() << " y=" << y;
  }
}

TEST_P(MarginalFamilies, FromLatentStaysFiniteInFarTails) {
  const Marginal& m = GetParam();
  for (double y : {-40.0, -9.0, 9.0, 40.0}) {
    const double x = m.from_latent(y);
    EXPECT_TRUE(std::isfinite(x));
    EXPECT_GE(x, m.support_lower());
    EXPECT_LE(x, m.support_upper());
  }
}

INSTANTIATE_TEST_SUITE_P(Families, MarginalFamilies,
                         ::testing::Values(Marginal::normal(0, 1), Marginal::normal(30, 3.5),
                                           Marginal::beta(2, 2, 0, 1), Marginal::beta(2, 5, 0, 1),
                                           Marginal::beta(5, 2, -10, 40), Marginal::beta(0.8, 1.7, 0, 2),
                                           Marginal::uniform(-2, 5)));

TEST(Marginal, EqualityComparesFamilyAndParameters) {
  EXPECT_EQ(Marginal::normal(1, 2), Marginal::normal(1, 2));
  EXPECT_FALSE(Marginal::normal(1, 2) == Marginal::normal(1, 3));
  EXPECT_FALSE(Marginal::uniform(0, 1) == Marginal::beta(1, 1, 0, 1));
}
