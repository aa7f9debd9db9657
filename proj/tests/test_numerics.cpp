#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "support/oracles.hpp"

using namespace selint;

namespace {

const KernelSpec k2{KernelFamily::Epanechnikov2};
const KernelSpec k4{KernelFamily::Epanechnikov4};

}  // namespace

TEST(Kernel, EpanechnikovValues) {
  EXPECT_DOUBLE_EQ(eval_kernel(k2, 0.0), 0.75);
  EXPECT_EQ(eval_kernel(k2, 1.5), 0.0);
  EXPECT_EQ(eval_kernel(k2, -1.0000001), 0.0);
  EXPECT_EQ(eval_kernel(k4, 2.0), 0.0);
}

TEST(Kernel, FourthOrderCoefficientsMatchExactSolution) {
  // Exact rational solution of a + b/5 = 1, a/5 + 3b/35 = 0.
  EXPECT_NEAR(k4.poly_a(), 15.0 / 8.0, 1e-14);
  EXPECT_NEAR(k4.poly_b(), -35.0 / 8.0, 1e-14);
  EXPECT_NEAR(eval_kernel(k4, 0.5), 0.439453125, 1e-14);
  EXPECT_EQ(k4.order(), 4);
  EXPECT_EQ(KernelSpec::of_order(4).family(), KernelFamily::Epanechnikov4);
  EXPECT_THROW(KernelSpec::of_order(3), Error);
}

TEST(Kernel, MomentsAgainstExactPolynomialIntegrals) {
  for (const KernelSpec& k : {k2, k4}) {
    const auto poly = oracle::epanechnikov_family(k.poly_a(), k.poly_b());
    for (int j = 0; j <= 2 * k.order(); ++j)
      EXPECT_NEAR(kernel_moment(k, j), static_cast<double>(oracle::moment(poly, j)), 2e-8) << "j=" << j;
    EXPECT_NEAR(kernel_l2(k), static_cast<double>(oracle::l2(poly)), 2e-8);
  }
}

TEST(Kernel, MomentInvariants) {
  const QuadratureGrid grid;
  for (const KernelSpec& k : {k2, k4}) {
    EXPECT_NEAR(kernel_moment(k, 0, grid), 1.0, 1e-8);
    for (int j = 1; j < k.order(); ++j) EXPECT_NEAR(kernel_moment(k, j, grid), 0.0, 1e-8);
    EXPECT_GT(std::abs(kernel_moment(k, k.order(), grid)), 1e-3);
    const QuadratureGrid fine = grid.refined();
    for (int j = 0; j <= k.order(); ++j)
      EXPECT_NEAR(kernel_moment(k, j, grid), kernel_moment(k, j, fine), 1e-8);
    EXPECT_NEAR(kernel_l2(k, grid), kernel_l2(k, fine), 1e-8);
  }
  EXPECT_NEAR(kernel_moment(k2, 2), 0.2, 1e-8);
  EXPECT_NEAR(kernel_l2(k2), 0.6, 1e-8);
  EXPECT_NEAR(kernel_l2(k4), 1.25, 1e-8);
  EXPECT_NEAR(kernel_moment(k4, 4), -1.0 / 21.0, 1e-8);
  EXPECT_THROW(kernel_moment(k2, 5), Error);
}

TEST(Kernel, ConstantsAreCachedQuadrature) {
  EXPECT_NEAR(kernel_constants(k2).l2, 0.6, 2e-8);
  EXPECT_NEAR(kernel_constants(k2).moment_p, 0.2, 2e-8);
  EXPECT_NEAR(kernel_constants(k4).moment_p, -1.0 / 21.0, 2e-8);
}

TEST(Kernel, EvenFunction) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const double u = unif(gen);
    EXPECT_EQ(eval_kernel(k2, u), eval_kernel(k2, -u));
    EXPECT_EQ(eval_kernel(k4, u), eval_kernel(k4, -u));
  }
}

TEST(Quadrature, GridShape) {
  const QuadratureGrid small(10);
  EXPECT_GE(small.size(), 201u);
  EXPECT_EQ(small.size() % 2, 1u);
  EXPECT_EQ(QuadratureGrid(402).size(), 403u);
  double total = 0.0;
  for (double w : small.weights()) {
    EXPECT_GT(w, 0.0);
    total += w;
  }
  EXPECT_NEAR(total, 2.0, 1e-12);
  EXPECT_EQ(small.nodes().front(), -1.0);
  EXPECT_EQ(small.nodes().back(), 1.0);
}

TEST(Normal, CdfAgainstSeriesOracle) {
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    const double expected = static_cast<double>(oracle::cdf(x));
    EXPECT_NEAR(normal_cdf(x) / expected, 1.0, 1e-12) << x;
  }
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-9);
}

TEST(Normal, FrozenHighPrecisionValues) {
  // 40-digit reference values.
  EXPECT_NEAR(normal_cdf(1.959964) / 0.9750000009035575957, 1.0, 1e-13);
  EXPECT_NEAR(normal_cdf(-5.0) / 2.8665157187919391167e-7, 1.0, 1e-13);
  EXPECT_NEAR(normal_cdf(-8.0) / 6.2209605742717841235e-16, 1.0, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.5) / 0.066807201268858066004, 1.0, 1e-13);
  EXPECT_NEAR(inverse_mills(-35.0) / 35.02852497059668787, 1.0, 1e-13);
  EXPECT_NEAR(inverse_mills(-29.0) / 29.034401237736325563, 1.0, 1e-12);
  EXPECT_NEAR(inverse_mills(2.0) / 0.055247862678989959102, 1.0, 1e-13);
  EXPECT_NEAR(inverse_mills(-3.0) / 3.2830986549304365069, 1.0, 1e-13);
  EXPECT_NEAR(log_normal_cdf(-40.0) / -804.60844201375378817, 1.0, 1e-13);
  EXPECT_NEAR(log_normal_cdf(-100.0) / -5005.5242086942050886, 1.0, 1e-13);
  EXPECT_NEAR(normal_quantile(0.975), 1.9599639845400542355, 1e-13);
  EXPECT_NEAR(normal_quantile(0.001), -3.0902323061678135415, 1e-13);
  EXPECT_NEAR(normal_quantile(1e-10), -6.3613409024040562047, 1e-12);
  EXPECT_NEAR(normal_quantile(0.6), 0.2533471031357997988, 1e-14);
}

TEST(Normal, SymmetryAndMonotonicity) {
  double prev = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-12);
    EXPECT_GE(normal_cdf(x), prev);
    prev = normal_cdf(x);
  }
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(Normal, InverseMills) {
  EXPECT_NEAR(inverse_mills(0.0), std::sqrt(2.0 / std::numbers::pi), 1e-10);
  double prev = inverse_mills(-60.0);
  for (double t = -59.9; t <= 10.0; t += 0.1) {
    const double v = inverse_mills(t);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, prev) << t;
    prev = v;
  }
  // Tail form is continuous with the direct ratio at the switch point.
  EXPECT_NEAR(inverse_mills(-30.0 - 1e-9) / inverse_mills(-30.0), 1.0, 1e-9);
  EXPECT_NEAR(inverse_mills(-1e6) / 1e6, 1.0, 1e-11);
}

TEST(Normal, QuantileInvertsCdf) {
  for (double p = 0.001; p < 1.0; p += 0.01) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14);
  EXPECT_THROW(normal_quantile(0.0), Error);
  EXPECT_THROW(normal_quantile(1.0), Error);
}

TEST(Summary, SampleQuantileType7) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.95), 3.85);
  EXPECT_THROW(sample_quantile(std::vector<double>{}, 0.5), Error);
}

TEST(Summary, MeanAndSd) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_NEAR(sample_sd(v), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(sample_sd(std::vector<double>{1.0}), 0.0);
}
