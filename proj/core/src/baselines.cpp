#include "selint/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "selint/transform.hpp"

namespace selint {

namespace {

std::vector<Eigen::Index> selected_rows(const Dataset& data) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < data.d.size(); ++i)
    if (data.d[i] == 1.0) rows.push_back(i);
  return rows;
}

struct SelectedDesign {
  Matrix A;
  Vector y;
};

SelectedDesign selected_design(const Dataset& data, const Matrix& extra) {
  if (extra.cols() > 0 && extra.rows() != data.d.size())
    fail(ErrorKind::InvalidArgument, "extra regressors have the wrong number of rows");
  const auto rows = selected_rows(data);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index cols = 1 + data.X.cols() + extra.cols();
  if (m <= cols)
    fail(ErrorKind::InsufficientSelected,
         std::to_string(m) + " selected observations for " + std::to_string(cols) + " regressors");
  SelectedDesign out{Matrix(m, cols), Vector(m)};
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = rows[static_cast<std::size_t>(r)];
    out.A(r, 0) = 1.0;
    out.A.row(r).segment(1, data.X.cols()) = data.X.row(i);
    if (extra.cols() > 0) out.A.row(r).tail(extra.cols()) = extra.row(i);
    out.y[r] = data.y[i];
  }
  return out;
}

Vector solve_least_squares(const Matrix& A, const Vector& y) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < A.cols()) fail(ErrorKind::SingularDesign, "regressor matrix is rank deficient");
  return qr.solve(y);
}

}  // namespace

namespace detail {

Vector selected_least_squares(const Dataset& data, const Matrix& extra_columns) {
  const SelectedDesign design = selected_design(data, extra_columns);
  return solve_least_squares(design.A, design.y);
}

}  // namespace detail

OlsFit ols_selected(const Dataset& data) {
  const SelectedDesign design = selected_design(data, Matrix());
  const Vector coef = solve_least_squares(design.A, design.y);
  const Vector resid = design.y - design.A * coef;
  const auto m = design.A.rows();
  const auto p = design.A.cols();
  const double s2 = resid.squaredNorm() / static_cast<double>(m - p);
  const Matrix cov = s2 * (design.A.transpose() * design.A).inverse();

  OlsFit fit;
  fit.theta = coef[0];
  fit.beta = coef.tail(p - 1);
  fit.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.n_used = static_cast<std::size_t>(m);
  return fit;
}

double probit_log_likelihood(const Vector& d, const Matrix& Z, const Vector& coef) {
  const Vector t = Z * coef;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) ll += d[i] == 1.0 ? log_normal_cdf(t[i]) : log_normal_cdf(-t[i]);
  return ll;
}

namespace {

struct ProbitDerivatives {
  Vector gradient;
  Matrix information;
};

ProbitDerivatives probit_derivatives(const Vector& d, const Matrix& Z, const Vector& coef) {
  const Vector t = Z * coef;
  const auto n = Z.rows();
  Vector score(n);
  Vector weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[i] == 1.0) {
      const double lam = inverse_mills(t[i]);
      score[i] = lam;
      weight[i] = lam * (lam + t[i]);
    } else {
      const double lam = inverse_mills(-t[i]);
      score[i] = -lam;
      weight[i] = lam * (lam - t[i]);
    }
  }
  ProbitDerivatives out;
  out.gradient = Z.transpose() * score;
  out.information = Z.transpose() * weight.asDiagonal() * Z;
  return out;
}

}  // namespace

ProbitFit probit_mle(const Vector& d, const Matrix& Z, const ProbitOptions& options) {
  const auto n = Z.rows();
  if (d.size() != n) fail(ErrorKind::InvalidArgument, "d and Z differ in length");
  if (Z.cols() < 1) fail(ErrorKind::InvalidArgument, "Z has no columns");
  const double ones = d.sum();
  if (ones == 0.0 || ones == static_cast<double>(n))
    fail(ErrorKind::ProbitFailed, "selection indicator is constant");

  Vector coef = Vector::Zero(Z.cols());
  double ll = probit_log_likelihood(d, Z, coef);
  ProbitFit fit;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const ProbitDerivatives der = probit_derivatives(d, Z, coef);
    if (der.gradient.norm() < options.gradient_tolerance) {
      fit.iterations = iter - 1;
      break;
    }
    Eigen::LDLT<Matrix> ldlt(der.information);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
      fail(ErrorKind::ProbitFailed, "information matrix is not positive definite");
    Vector step = ldlt.solve(der.gradient);
    double trial_ll = probit_log_likelihood(d, Z, coef + step);
    int halvings = 0;
    while (!(trial_ll >= ll) && halvings < 40) {
      step *= 0.5;
      trial_ll = probit_log_likelihood(d, Z, coef + step);
      ++halvings;
    }
    if (!(trial_ll >= ll)) {
      // No ascent possible at working precision: treat as converged.
      fit.iterations = iter;
      break;
    }
    coef += step;
    ll = trial_ll;
    fit.iterations = iter;
    if (!coef.allFinite() || coef.norm() > options.divergence_bound)
      fail(ErrorKind::ProbitFailed, "coefficients diverged (norm above " +
                                        std::to_string(options.divergence_bound) + ")");
    if (ll > -1e-8) fail(ErrorKind::ProbitFailed, "selection is perfectly separated by the index");
    if (step.norm() <= 1e-13 * (1.0 + coef.norm())) break;
    if (iter == options.max_iterations) {
      const ProbitDerivatives last = probit_derivatives(d, Z, coef);
      if (last.gradient.norm() >= std::max(options.gradient_tolerance, 1e-6))
        fail(ErrorKind::ProbitFailed, "no convergence within the iteration budget");
    }
  }

  const ProbitDerivatives der = probit_derivatives(d, Z, coef);
  Eigen::LDLT<Matrix> ldlt(der.information);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::ProbitFailed, "information matrix is singular");
  const Matrix cov = ldlt.solve(Matrix::Identity(Z.cols(), Z.cols()));
  fit.coef = coef;
  fit.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.log_likelihood = ll;
  return fit;
}

HeckmanFit heckman_two_step(const Dataset& data, const ProbitOptions& options) {
  const ProbitFit probit = probit_mle(data.d, data.Z, options);
  const Vector index = data.Z * probit.coef;
  Matrix lambda(index.size(), 1);
  for (Eigen::Index i = 0; i < index.size(); ++i) lambda(i, 0) = inverse_mills(index[i]);
  const Vector coef = detail::selected_least_squares(data, lambda);
  HeckmanFit fit;
  fit.theta = coef[0];
  fit.beta = coef.segment(1, data.X.cols());
  fit.lambda_coef = coef[coef.size() - 1];
  fit.gamma = probit.coef;
  return fit;
}

void TailRule::validate() const {
  if (!(quantile > 0.0 && quantile < 1.0)) fail(ErrorKind::InvalidArgument, "tail quantile must lie in (0, 1)");
  if (!(tau_quantile > 0.0 && tau_quantile < 1.0))
    fail(ErrorKind::InvalidArgument, "tau quantile must lie in (0, 1)");
}

TailThresholds tail_thresholds(std::span<const double> index, const TailRule& rule) {
  rule.validate();
  return {sample_quantile(index, rule.quantile), sample_quantile(index, rule.tau_quantile)};
}

double as98_weight(double u, double tau) noexcept {
  if (u <= 0.0) return 0.0;
  if (u >= tau) return 1.0;
  return 1.0 - std::exp(-u / (tau - u));
}

namespace {

void check_tail_inputs(std::span<const double> d, std::span<const double> w, std::span<const double> index) {
  if (d.size() != w.size() || d.size() != index.size())
    fail(ErrorKind::InvalidArgument, "tail estimator inputs differ in length");
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

InterceptEstimate h90_intercept(std::span<const double> d, std::span<const double> w,
                                std::span<const double> index, double b) {
  check_tail_inputs(d, w, index);
  std::vector<double> tail;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] == 1.0 && index[i] > b) tail.push_back(w[i]);
  if (tail.empty()) fail(ErrorKind::EmptyTail, "no selected observation has index above " + std::to_string(b));
  InterceptEstimate out;
  out.theta = mean(tail);
  out.std_error = sample_sd(tail) / std::sqrt(static_cast<double>(tail.size()));
  out.effective_n = tail.size();
  out.bandwidth = static_cast<double>(tail.size()) / static_cast<double>(d.size());
  out.method = "h90";
  return out;
}

InterceptEstimate h90_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                const TailRule& rule) {
  const Vector index = selection_index(data.Z, gamma);
  const Vector w = residualized_outcome(data, beta);
  const TailThresholds thr = tail_thresholds(as_span(index), rule);
  return h90_intercept(as_span(data.d), as_span(w), as_span(index), thr.b);
}

InterceptEstimate as98_intercept(std::span<const double> d, std::span<const double> w,
                                 std::span<const double> index, const TailThresholds& thresholds) {
  check_tail_inputs(d, w, index);
  double num = 0.0;
  double den = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 1.0) continue;
    const double s = as98_weight(index[i] - thresholds.b, thresholds.tau);
    if (s == 0.0) continue;
    num += s * w[i];
    den += s;
    ++count;
  }
  if (!(den > 0.0)) fail(ErrorKind::EmptyTail, "smooth tail weights sum to zero");
  InterceptEstimate out;
  out.theta = num / den;
  double spread = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 1.0) continue;
    const double s = as98_weight(index[i] - thresholds.b, thresholds.tau);
    spread += s * s * (w[i] - out.theta) * (w[i] - out.theta);
  }
  out.std_error = std::sqrt(spread) / den;
  out.effective_n = count;
  out.bandwidth = static_cast<double>(count) / static_cast<double>(d.size());
  out.method = "as98";
  return out;
}

InterceptEstimate as98_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                 const TailRule& rule) {
  const Vector index = selection_index(data.Z, gamma);
  const Vector w = residualized_outcome(data, beta);
  const TailThresholds thr = tail_thresholds(as_span(index), rule);
  return as98_intercept(as_span(data.d), as_span(w), as_span(index), thr);
}

}  // namespace selint
