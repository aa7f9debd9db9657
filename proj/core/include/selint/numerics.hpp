#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace selint {

enum class KernelFamily { Epanechnikov2, Epanechnikov4 };

std::string_view to_string(KernelFamily family) noexcept;

/// Symmetric polynomial kernel on [-1, 1] of even order p.
///
/// Epanechnikov2 is (3/4)(1 - u^2). Epanechnikov4 multiplies the Epanechnikov
/// density by a + b u^2, with (a, b) solved from the Epanechnikov moments so
/// that the result integrates to one and has a vanishing second moment.
class KernelSpec {
 public:
  explicit KernelSpec(KernelFamily family = KernelFamily::Epanechnikov2);

  static KernelSpec of_order(int order);

  KernelFamily family() const noexcept { return family_; }
  int order() const noexcept { return order_; }

  double operator()(double u) const noexcept;

  // Multiplier coefficients (a, b); Epanechnikov2 has (1, 0).
  double poly_a() const noexcept { return a_; }
  double poly_b() const noexcept { return b_; }

 private:
  KernelFamily family_;
  int order_;
  double a_ = 1.0;
  double b_ = 0.0;
};

double eval_kernel(const KernelSpec& spec, double u) noexcept;

/// Composite Simpson rule on a uniform grid over [-1, 1].
class QuadratureGrid {
 public:
  // node_count is rounded up to the next odd number and to at least 201.
  explicit QuadratureGrid(std::size_t node_count = 401);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

  QuadratureGrid refined() const { return QuadratureGrid(2 * nodes_.size() - 1); }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Numeric integral of u^j K(u) over [-1, 1]. Requires j <= 2p.
double kernel_moment(const KernelSpec& spec, int j, const QuadratureGrid& grid = QuadratureGrid{});

/// Numeric integral of K(u)^2 over [-1, 1].
double kernel_l2(const KernelSpec& spec, const QuadratureGrid& grid = QuadratureGrid{});

// Constants the estimator needs repeatedly.
struct KernelConstants {
  double l2;        // integral of K^2
  double moment_p;  // integral of u^p K
};

KernelConstants kernel_constants(const KernelSpec& spec);

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
double log_normal_cdf(double x) noexcept;

/// Inverse Mills ratio phi(t) / Phi(t). Uses a continued fraction for t < -30.
double inverse_mills(double t) noexcept;

/// Standard normal quantile (Wichura AS241). Requires 0 < p < 1.
double normal_quantile(double p);

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). Copies and partially sorts.
double sample_quantile(std::span<const double> values, double prob);

double mean(std::span<const double> values) noexcept;
// Sample standard deviation with n - 1 denominator; 0 for fewer than 2 values.
double sample_sd(std::span<const double> values) noexcept;

}  // namespace selint
