#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "selint/baselines.hpp"
#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "support/oracles.hpp"

using namespace selint;

namespace {

Dataset linear_dataset(std::mt19937_64& gen, Eigen::Index n, double noise) {
  std::normal_distribution<double> N;
  Dataset data;
  data.X.resize(n, 3);
  data.Z.resize(n, 4);
  data.d.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) data.Z(i, j) = N(gen);
    data.X.row(i) = data.Z.row(i).head(3);
    const double v = N(gen);
    data.d[i] = data.Z(i, 0) + 0.5 * data.Z(i, 3) >= v ? 1.0 : 0.0;
    data.y[i] = data.d[i] * (4.0 + data.X(i, 0) - 2.0 * data.X(i, 1) + 0.5 * data.X(i, 2) + noise * N(gen));
  }
  return data;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

std::vector<double> vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST(Ols, ExactLinearData) {
  std::mt19937_64 gen(1);
  const Dataset data = linear_dataset(gen, 100, 0.0);
  const OlsFit fit = ols_selected(data);
  EXPECT_NEAR(fit.theta, 4.0, 1e-10);
  EXPECT_NEAR(fit.beta[0], 1.0, 1e-10);
  EXPECT_NEAR(fit.beta[1], -2.0, 1e-10);
  EXPECT_NEAR(fit.beta[2], 0.5, 1e-10);
  EXPECT_EQ(fit.n_used, data.selected_count());
}

TEST(Ols, MatchesNormalEquationOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = linear_dataset(gen, trial == 0 ? 200 : 20 + trial * 3, 1.0);
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < data.d.size(); ++i)
      if (data.d[i] == 1.0) rows.push_back(i);
    Matrix A(static_cast<Eigen::Index>(rows.size()), 4);
    Vector y(A.rows());
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      A(r, 0) = 1.0;
      A.row(r).tail(3) = data.X.row(rows[static_cast<std::size_t>(r)]);
      y[r] = data.y[rows[static_cast<std::size_t>(r)]];
    }
    const Vector expected = oracle::least_squares(A, y);
    const OlsFit fit = ols_selected(data);
    EXPECT_NEAR(fit.theta, expected[0], 1e-10);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fit.beta[j], expected[j + 1], 1e-10);
  }
}

TEST(Ols, Errors) {
  std::mt19937_64 gen(3);
  Dataset data = linear_dataset(gen, 50, 1.0);
  Dataset none = data;
  none.d.setZero();
  EXPECT_EQ(kind_of([&] { ols_selected(none); }), ErrorKind::InsufficientSelected);
  Dataset collinear = data;
  collinear.X.col(2) = 2.0 * collinear.X.col(1);
  EXPECT_EQ(kind_of([&] { ols_selected(collinear); }), ErrorKind::SingularDesign);
}

TEST(Probit, RecoversCoefficientsAndDetectsFailures) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> N;
  const Eigen::Index n = 20000;
  Matrix Z(n, 2);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Z(i, 0) = N(gen);
    Z(i, 1) = N(gen);
    d[i] = 0.8 * Z(i, 0) - 0.4 * Z(i, 1) >= N(gen) ? 1.0 : 0.0;
  }
  const ProbitFit fit = probit_mle(d, Z);
  EXPECT_NEAR(fit.coef[0], 0.8, 0.05);
  EXPECT_NEAR(fit.coef[1], -0.4, 0.05);
  EXPECT_NEAR(fit.log_likelihood, probit_log_likelihood(d, Z, fit.coef), 1e-9);
  // First-order condition at the optimum.
  for (double step : {1e-4, -1e-4}) {
    Vector moved = fit.coef;
    moved[0] += step;
    EXPECT_LE(probit_log_likelihood(d, Z, moved), fit.log_likelihood);
  }

  Vector separated(n);
  for (Eigen::Index i = 0; i < n; ++i) separated[i] = Z(i, 0) > 0 ? 1.0 : 0.0;
  EXPECT_EQ(kind_of([&] { probit_mle(separated, Z); }), ErrorKind::ProbitFailed);
  EXPECT_EQ(kind_of([&] { probit_mle(Vector::Ones(n), Z); }), ErrorKind::ProbitFailed);
}

TEST(Heckman, StepTwoUsesInverseMills) {
  EXPECT_NEAR(inverse_mills(0.0), std::sqrt(2.0 / std::numbers::pi), 1e-10);
  std::mt19937_64 gen(5);
  const Dataset data = linear_dataset(gen, 3000, 1.0);
  const HeckmanFit fit = heckman_two_step(data);
  ASSERT_EQ(fit.beta.size(), 3);
  // Independent errors: selection correction term near zero, intercept near truth.
  EXPECT_NEAR(fit.theta, 4.0, 0.25);
  EXPECT_NEAR(fit.beta[1], -2.0, 0.1);

  // Step two by hand with the reported first-step coefficients.
  const Vector index = data.Z * fit.gamma;
  Matrix lambda(index.size(), 1);
  for (Eigen::Index i = 0; i < index.size(); ++i) lambda(i, 0) = inverse_mills(index[i]);
  const Vector coef = detail::selected_least_squares(data, lambda);
  EXPECT_NEAR(coef[0], fit.theta, 1e-12);
  EXPECT_NEAR(coef[4], fit.lambda_coef, 1e-12);
}

TEST(Heckman, ZeroMillsCoefficientIsOls) {
  std::mt19937_64 gen(6);
  const Dataset data = linear_dataset(gen, 400, 1.0);
  const Vector restricted = detail::selected_least_squares(data, Matrix());
  const OlsFit ols = ols_selected(data);
  EXPECT_EQ(restricted[0], ols.theta);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(restricted[j + 1], ols.beta[j]);
}

TEST(Heckman, SeparationFails) {
  std::mt19937_64 gen(7);
  Dataset data = linear_dataset(gen, 500, 1.0);
  for (Eigen::Index i = 0; i < data.d.size(); ++i) data.d[i] = data.Z(i, 0) > 0.0 ? 1.0 : 0.0;
  EXPECT_EQ(kind_of([&] { heckman_two_step(data); }), ErrorKind::ProbitFailed);
}

TEST(Tail, H90Examples) {
  const std::vector<double> d{1, 1, 1, 0}, w{1, 2, 3, 0}, index{0.1, 0.2, 0.9, 0.95};
  EXPECT_EQ(h90_intercept(d, w, index, 0.5).theta, 3.0);
  EXPECT_EQ(kind_of([&] { h90_intercept(d, w, index, 2.0); }), ErrorKind::EmptyTail);
}

TEST(Tail, SmoothWeight) {
  EXPECT_NEAR(as98_weight(0.5, 1.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(as98_weight(1.5, 3.0), 0.6321206, 1e-7);
  EXPECT_EQ(as98_weight(0.0, 1.0), 0.0);
  EXPECT_EQ(as98_weight(1.0, 1.0), 1.0);
  EXPECT_EQ(as98_weight(-3.0, 1.0), 0.0);
  double prev = 0.0;
  for (double u = -0.5; u <= 1.5; u += 1e-4) {
    const double s = as98_weight(u, 1.0);
    EXPECT_GE(s, prev);
    EXPECT_LE(std::abs(s - prev), 2e-3);  // no jumps on a fine grid
    prev = s;
  }
}

TEST(Tail, As98LimitIsH90) {
  std::mt19937_64 gen(8);
  const Dataset data = linear_dataset(gen, 300, 1.0);
  const Vector beta(Vector::Zero(3));
  const Vector index = data.Z * Vector::Ones(4);
  const Vector w = residualized_outcome(data, Vector::Ones(3));
  const std::span<const double> ds(data.d.data(), 300), ws(w.data(), 300), is(index.data(), 300);
  const double b = sample_quantile(is, 0.9);
  const double h90 = h90_intercept(ds, ws, is, b).theta;
  EXPECT_NEAR(as98_intercept(ds, ws, is, {b, 1e-12}).theta, h90, 1e-10);
  EXPECT_EQ(as98_intercept(ds, ws, is, {b, -1.0}).theta, h90);
  std::vector<double> zero_d(300, 0.0);
  EXPECT_EQ(kind_of([&] { as98_intercept(zero_d, ws, is, {b, 1.0}); }), ErrorKind::EmptyTail);
}

TEST(Tail, MatchesBruteForce) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = linear_dataset(gen, 20 + trial, 1.0);
    Vector beta(3), gamma(4);
    beta << 1.0, -2.0, 0.5;
    gamma << 1.0, 0.3, 0.0, 0.5;
    TailRule rule{0.6, 0.3};
    const Vector index = data.Z * gamma;
    const Vector w = residualized_outcome(data, beta);
    const auto thr = tail_thresholds({index.data(), static_cast<std::size_t>(index.size())}, rule);
    try {
      const double got = h90_intercept(data, beta, gamma, rule).theta;
      EXPECT_NEAR(got, oracle::tail_mean(vec(data.d), vec(w), vec(index), thr.b), 1e-10);
    } catch (const Error&) {
    }
    try {
      const double got = as98_intercept(data, beta, gamma, rule).theta;
      EXPECT_NEAR(got, oracle::smooth_tail_mean(vec(data.d), vec(w), vec(index), thr.b, thr.tau), 1e-10);
    } catch (const Error&) {
    }
  }
}

TEST(Tail, ScaleInvariance) {
  std::mt19937_64 gen(10);
  const Dataset data = linear_dataset(gen, 400, 1.0);
  const Vector beta = Vector::Ones(3);
  Vector gamma(4);
  gamma << 1.0, 0.2, 0.0, 0.5;
  TailRule rule{0.9, 0.95};
  EXPECT_NEAR(h90_intercept(data, beta, gamma, rule).theta, h90_intercept(data, beta, 2.5 * gamma, rule).theta, 1e-12);
  EXPECT_NEAR(as98_intercept(data, beta, gamma, rule).theta, as98_intercept(data, beta, 2.5 * gamma, rule).theta,
              1e-12);
}

TEST(Tail, RuleValidation) {
  EXPECT_THROW((TailRule{1.0, 0.5}.validate()), Error);
  EXPECT_THROW((TailRule{0.5, 0.0}.validate()), Error);
}
