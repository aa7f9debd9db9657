#include "selint/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selint/error.hpp"

namespace selint {

std::string_view to_string(KernelFamily family) noexcept {
  return family == KernelFamily::Epanechnikov2 ? "epanechnikov2" : "epanechnikov4";
}

namespace {

// Integral of u^j (3/4)(1 - u^2) over [-1, 1].
double epanechnikov_moment(int j) {
  if (j % 2 != 0) return 0.0;
  return 0.75 * (2.0 / (j + 1) - 2.0 / (j + 3));
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family) : family_(family) {
  if (family == KernelFamily::Epanechnikov2) {
    order_ = 2;
    return;
  }
  order_ = 4;
  // a mu0 + b mu2 = 1 and a mu2 + b mu4 = 0.
  const double m0 = epanechnikov_moment(0);
  const double m2 = epanechnikov_moment(2);
  const double m4 = epanechnikov_moment(4);
  const double det = m0 * m4 - m2 * m2;
  a_ = m4 / det;
  b_ = -m2 / det;
}

KernelSpec KernelSpec::of_order(int order) {
  if (order == 2) return KernelSpec(KernelFamily::Epanechnikov2);
  if (order == 4) return KernelSpec(KernelFamily::Epanechnikov4);
  fail(ErrorKind::InvalidArgument, "kernel order must be 2 or 4, got " + std::to_string(order));
}

double KernelSpec::operator()(double u) const noexcept {
  if (!(std::abs(u) <= 1.0)) return 0.0;
  const double u2 = u * u;
  return 0.75 * (1.0 - u2) * (a_ + b_ * u2);
}

double eval_kernel(const KernelSpec& spec, double u) noexcept { return spec(u); }

QuadratureGrid::QuadratureGrid(std::size_t node_count) {
  std::size_t m = std::max<std::size_t>(node_count, 201);
  if (m % 2 == 0) ++m;
  nodes_.resize(m);
  weights_.resize(m);
  const double step = 2.0 / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    nodes_[i] = -1.0 + step * static_cast<double>(i);
    double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    weights_[i] = w * step / 3.0;
  }
  nodes_.back() = 1.0;
}

double kernel_moment(const KernelSpec& spec, int j, const QuadratureGrid& grid) {
  if (j < 0 || j > 2 * spec.order())
    fail(ErrorKind::InvalidArgument, "moment index out of range: " + std::to_string(j));
  return grid.integrate([&](double u) { return std::pow(u, j) * spec(u); });
}

double kernel_l2(const KernelSpec& spec, const QuadratureGrid& grid) {
  return grid.integrate([&](double u) {
    const double k = spec(u);
    return k * k;
  });
}

KernelConstants kernel_constants(const KernelSpec& spec) {
  static const auto compute = [](KernelFamily family) {
    const KernelSpec k(family);
    const QuadratureGrid grid;
    return KernelConstants{kernel_l2(k, grid), kernel_moment(k, k.order(), grid)};
  };
  static const KernelConstants second = compute(KernelFamily::Epanechnikov2);
  static const KernelConstants fourth = compute(KernelFamily::Epanechnikov4);
  return spec.family() == KernelFamily::Epanechnikov2 ? second : fourth;
}

double normal_pdf(double x) noexcept {
  constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// (1 - Phi(x)) / phi(x) for large positive x by continued fraction.
double mills_ratio_upper(double x) noexcept {
  double acc = x;
  for (int k = 60; k >= 1; --k) acc = x + k / acc;
  return 1.0 / acc;
}

constexpr double kMillsSwitch = -30.0;

}  // namespace

double log_normal_cdf(double x) noexcept {
  if (x >= kMillsSwitch) return std::log(normal_cdf(x));
  const double log_pdf = -0.5 * x * x - 0.918938533204672741780329736406;
  return log_pdf + std::log(mills_ratio_upper(-x));
}

double inverse_mills(double t) noexcept {
  if (t < kMillsSwitch) return 1.0 / mills_ratio_upper(-t);
  return normal_pdf(t) / normal_cdf(t);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::InvalidArgument, "quantile probability must be in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

double sample_quantile(std::span<const double> values, double prob) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) fail(ErrorKind::InvalidArgument, "quantile probability outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double mean(std::span<const double> values) noexcept {
  if (values.empty()) return std::nan("");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) noexcept {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace selint
