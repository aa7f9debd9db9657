#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "selint/error.hpp"
#include "selint/snn_estimator.hpp"
#include "support/oracles.hpp"

using namespace selint;

namespace {

const KernelSpec k2{KernelFamily::Epanechnikov2};

double epanechnikov(double u) { return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Dataset random_dataset(std::mt19937_64& gen, Eigen::Index n, Eigen::Index k, Eigen::Index l) {
  std::normal_distribution<double> N;
  Dataset data;
  data.X.resize(n, k);
  data.Z.resize(n, l);
  data.d.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) data.X(i, j) = N(gen);
    for (Eigen::Index j = 0; j < l; ++j) data.Z(i, j) = N(gen);
    data.d[i] = N(gen) > -0.3 ? 1.0 : 0.0;
    data.y[i] = N(gen) * 2.0 + 1.0;
  }
  return data;
}

}  // namespace

TEST(Residualized, Examples) {
  Dataset data;
  data.d = Vector(2);
  data.d << 1, 0;
  data.y = Vector(2);
  data.y << 3, 9;
  data.X = Matrix::Ones(2, 2);
  data.Z = Matrix::Ones(2, 1);
  const Vector w = residualized_outcome(data, Vector::Zero(2));
  EXPECT_EQ(w[0], 3.0);
  EXPECT_EQ(w[1], 0.0);

  std::mt19937_64 gen(1);
  Dataset r = random_dataset(gen, 10, 4, 5);
  Vector beta(4);
  beta << 0.5, -1.0, 2.0, 0.25;
  const Vector got = residualized_outcome(r, beta);
  for (Eigen::Index i = 0; i < 10; ++i) {
    double fitted = 0.0;
    for (Eigen::Index j = 0; j < 4; ++j) fitted += r.X(i, j) * beta[j];
    EXPECT_NEAR(got[i], r.d[i] * (r.y[i] - fitted), 1e-14);
  }
  r.d.setOnes();
  r.y = r.X * beta;
  EXPECT_NEAR(residualized_outcome(r, beta).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(SnnIntercept, ReproducesConstantsAndAffineFunctions) {
  std::mt19937_64 gen(2);
  Dataset data = random_dataset(gen, 200, 2, 3);
  const Vector gamma = Vector::Ones(3);
  const IndexRanks ranks = eta_hat(data.Z, gamma);
  std::vector<double> constant(200, 5.0), affine(200);
  for (std::size_t i = 0; i < 200; ++i) affine[i] = 2.0 + 3.0 * (ranks[i] - 1.0);
  for (double h : {0.1, 0.3, 0.8, 1.0}) {
    EXPECT_NEAR(snn_intercept(ranks.values, constant, k2, BandwidthRule::fixed(h)).theta, 5.0, 1e-12);
    EXPECT_NEAR(snn_intercept(ranks.values, affine, k2, BandwidthRule::fixed(h)).theta, 2.0, 1e-10);
    EXPECT_NEAR(snn_intercept(ranks.values, affine, KernelSpec(KernelFamily::Epanechnikov4), BandwidthRule::fixed(h)).theta,
                2.0, 1e-10);
  }
  EXPECT_NEAR(snn_intercept(ranks.values, affine, k2, BandwidthRule::plug_in()).theta, 2.0, 1e-10);
}

TEST(SnnIntercept, MatchesBruteForceNormalEquations) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> H(0.3, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(gen() % 41);
    Dataset data = random_dataset(gen, n, 2, 3);
    Vector beta(2), gamma(3);
    beta << 0.3, -0.7;
    gamma << 1.0, 0.5, -0.25;
    const double h = trial == 0 ? 0.8 : H(gen);
    const InterceptEstimate est = snn_intercept(data, beta, gamma, k2, BandwidthRule::fixed(h));
    ASSERT_EQ(est.bandwidth, h);
    const Vector index = data.Z * gamma;
    const auto eta = oracle::eta_brute(std::vector<double>(index.data(), index.data() + n));
    const Vector w = residualized_outcome(data, beta);
    const double expected =
        oracle::local_linear_brute(eta, std::vector<double>(w.data(), w.data() + n), epanechnikov, h);
    EXPECT_NEAR(est.theta, expected, 1e-10) << "trial " << trial;
    EXPECT_GE(est.effective_n, 2u);
    EXPECT_TRUE(std::isfinite(est.std_error));
  }
}

TEST(SnnIntercept, RankInvariance) {
  std::mt19937_64 gen(4);
  Dataset data = random_dataset(gen, 150, 2, 1);
  const Vector beta = Vector::Constant(2, 0.5);
  const Vector gamma = Vector::Ones(1);
  const auto base = snn_intercept(data, beta, gamma, k2, BandwidthRule::fixed(0.4));
  EXPECT_EQ(base.theta, snn_intercept(data, beta, 3.5 * gamma, k2, BandwidthRule::fixed(0.4)).theta);
  Dataset mapped = data;
  mapped.Z = data.Z.array().exp();
  EXPECT_EQ(base.theta, snn_intercept(mapped, beta, gamma, k2, BandwidthRule::fixed(0.4)).theta);
  mapped.Z = data.Z.array().cube() + 2.0 * data.Z.array();
  EXPECT_EQ(base.theta, snn_intercept(mapped, beta, gamma, k2, BandwidthRule::fixed(0.4)).theta);
  // The plug-in bandwidth is itself rank based, so the estimate is invariant too.
  EXPECT_EQ(snn_intercept(data, beta, gamma, k2, BandwidthRule::plug_in()).theta,
            snn_intercept(mapped, beta, gamma, k2, BandwidthRule::plug_in()).theta);
}

TEST(SnnIntercept, EffectiveNShrinksWithBandwidth) {
  std::mt19937_64 gen(5);
  Dataset data = random_dataset(gen, 300, 2, 2);
  const Vector beta = Vector::Zero(2), gamma = Vector::Ones(2);
  std::size_t prev = 1000000;
  for (double h = 1.0; h >= 0.05; h -= 0.05) {
    const auto est = snn_intercept(data, beta, gamma, k2, BandwidthRule::fixed(h));
    EXPECT_LE(est.effective_n, prev);
    prev = est.effective_n;
  }
}

TEST(SnnIntercept, StandardErrorScalesWithSampleSize) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> N;
  auto se_at = [&](std::size_t n) {
    std::vector<double> ranks(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      ranks[i] = (i + 1.0) / n;
      w[i] = 1.0 + N(gen);
    }
    return snn_intercept(ranks, w, k2, BandwidthRule::fixed(0.3)).std_error;
  };
  const double ratio = se_at(4000) / se_at(2000);
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.25 / std::sqrt(2.0));
  // sigma^2 * int K^2 / (n h) with sigma^2 near 1.
  EXPECT_NEAR(se_at(2000), std::sqrt(0.6 / (2000 * 0.3)), 0.1 * std::sqrt(0.6 / 600));
}

TEST(SnnIntercept, WindowErrorsAndFallback) {
  const std::vector<double> low{0.1, 0.2, 0.3}, w{1.0, 2.0, 3.0};
  try {
    local_linear_at_boundary(low, w, k2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoEffectiveObservations);
  }
  const std::vector<double> tied{1.0, 1.0, 1.0};
  try {
    snn_intercept(tied, w, k2, BandwidthRule::fixed(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateLocalDesign);
  }
  // Only the top rank lies within 0.05 of 1; widening reaches a usable window.
  std::vector<double> ranks, ws;
  for (int i = 1; i <= 10; ++i) {
    ranks.push_back(i / 10.0);
    ws.push_back(4.0);
  }
  EXPECT_THROW(local_linear_at_boundary(ranks, ws, k2, 0.05), Error);
  const auto fit = local_linear_with_fallback(ranks, ws, k2, 0.05);
  EXPECT_GT(fit.bandwidth, 0.1);
  EXPECT_LE(fit.bandwidth, 0.5);
  EXPECT_NEAR(fit.intercept, 4.0, 1e-12);
  // A well-posed window is left alone.
  EXPECT_EQ(local_linear_with_fallback(ranks, ws, k2, 0.35).bandwidth, 0.35);
}

TEST(BandwidthRule, Validation) {
  EXPECT_THROW(BandwidthRule::fixed(0.0), Error);
  EXPECT_THROW(BandwidthRule::fixed(1.2), Error);
  EXPECT_NO_THROW(BandwidthRule::fixed(1.0));
  EXPECT_THROW(BandwidthRule::plug_in(0.0), Error);
  EXPECT_EQ(BandwidthRule::plug_in().describe(), "plugin");
  EXPECT_EQ(BandwidthRule::fixed(0.25).describe(), "fixed:0.25");
}

TEST(PlugIn, ZeroPilotCurvatureHitsUpperClamp) {
  std::vector<double> ranks, w;
  for (int i = 1; i <= 200; ++i) {
    ranks.push_back(i / 200.0);
    w.push_back(1.0 + 2.0 * (i / 200.0 - 1.0));
  }
  EXPECT_EQ(plug_in_bandwidth(ranks, w, k2), kMaxPlugInBandwidth);
  EXPECT_THROW(plug_in_bandwidth(std::vector<double>(10, 1.0), std::vector<double>(10, 1.0), k2), Error);
}

TEST(PlugIn, RateInSampleSize) {
  auto bandwidth_at = [](std::size_t n) {
    std::vector<double> ranks(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      ranks[i] = (i + 1.0) / n;
      w[i] = 3.0 * (ranks[i] - 1.0) * (ranks[i] - 1.0) + (i % 2 ? 0.5 : -0.5);
    }
    return plug_in_bandwidth(ranks, w, k2);
  };
  const double h1 = bandwidth_at(2000), h16 = bandwidth_at(32000);
  ASSERT_GT(h16, kMinPlugInBandwidth);
  ASSERT_LT(h1, kMaxPlugInBandwidth);
  EXPECT_NEAR(h16 / h1, std::pow(1.0 / 16.0, 0.2), 0.02);
}

TEST(PlugIn, AgreesWithAnalyticOptimumForKnownCurve) {
  // m(q) = (q - 1)^2, noise sd 0.2: second derivative 2, sigma^2 = 0.04.
  const std::size_t n = 5000;
  const double analytic = std::pow(4.0 * 0.04 * 0.6 / (2.0 * 2.0 * 0.2 * 0.2 * 4.0 * n), 0.2);
  std::mt19937_64 gen(8);
  std::normal_distribution<double> N;
  int within = 0;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> ranks(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      ranks[i] = (i + 1.0) / n;
      w[i] = (ranks[i] - 1.0) * (ranks[i] - 1.0) + 0.2 * N(gen);
    }
    within += std::abs(plug_in_bandwidth(ranks, w, k2) / analytic - 1.0) <= 0.2;
  }
  EXPECT_GE(within, 4);
}

TEST(Undersmoothing, Schedule) {
  EXPECT_DOUBLE_EQ(undersmoothing_bandwidth(1, 2, 0.3), 0.3);
  EXPECT_NEAR(undersmoothing_bandwidth(32, 2, 1.0), 0.5, 1e-15);
  double prev = 2.0;
  for (std::size_t n = 1; n < 100000; n *= 3) {
    const double h = undersmoothing_bandwidth(n, 2, 1.0);
    EXPECT_LT(h, prev);
    prev = h;
  }
}
