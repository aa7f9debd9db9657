#pragma once

#include <cstddef>

#include "selint/dataset.hpp"
#include "selint/snn_estimator.hpp"

namespace selint {

struct OlsFit {
  double theta = 0.0;
  Vector beta;
  Vector std_errors;  // intercept first, then slopes
  std::size_t n_used = 0;
};

/// Least squares of y on (1, X) over the selected rows.
OlsFit ols_selected(const Dataset& data);

struct ProbitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double divergence_bound = 1e4;
};

struct ProbitFit {
  Vector coef;
  Vector std_errors;  // from the inverse observed information
  double log_likelihood = 0.0;
  int iterations = 0;
};

/// Probit MLE of d on the columns of Z (no constant added), by Newton steps
/// with step halving.
ProbitFit probit_mle(const Vector& d, const Matrix& Z, const ProbitOptions& options = {});

double probit_log_likelihood(const Vector& d, const Matrix& Z, const Vector& coef);

struct HeckmanFit {
  double theta = 0.0;
  Vector beta;
  double lambda_coef = 0.0;
  Vector gamma;
};

/// Two-step estimator: probit of d on Z, then least squares of y on
/// (1, X, inverse Mills ratio) over the selected rows.
HeckmanFit heckman_two_step(const Dataset& data, const ProbitOptions& options = {});

namespace detail {
// y on (1, X, extra columns) over the selected rows; returns the coefficient
// vector (intercept first). Shared by ols_selected and heckman_two_step.
Vector selected_least_squares(const Dataset& data, const Matrix& extra_columns);
}  // namespace detail

struct TailRule {
  double quantile = 0.95;
  double tau_quantile = 0.5;

  void validate() const;
};

struct TailThresholds {
  double b = 0.0;
  double tau = 0.0;
};

TailThresholds tail_thresholds(std::span<const double> index, const TailRule& rule);

/// Smooth tail weight: 0 for u <= 0, 1 for u >= tau, 1 - exp(-u / (tau - u)) between.
double as98_weight(double u, double tau) noexcept;

InterceptEstimate h90_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                const TailRule& rule);
InterceptEstimate h90_intercept(std::span<const double> d, std::span<const double> w,
                                std::span<const double> index, double b);

InterceptEstimate as98_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                 const TailRule& rule);
InterceptEstimate as98_intercept(std::span<const double> d, std::span<const double> w,
                                 std::span<const double> index, const TailThresholds& thresholds);

}  // namespace selint
