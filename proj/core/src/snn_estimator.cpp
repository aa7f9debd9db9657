#include "selint/snn_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selint/error.hpp"

namespace selint {

BandwidthRule BandwidthRule::fixed(double h) {
  if (!(h > 0.0 && h <= 1.0)) fail(ErrorKind::InvalidArgument, "fixed bandwidth must lie in (0, 1]");
  return {Kind::Fixed, h};
}

BandwidthRule BandwidthRule::plug_in(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    fail(ErrorKind::InvalidArgument, "plug-in scale must be positive");
  return {Kind::PlugIn, scale};
}

std::string BandwidthRule::describe() const {
  std::ostringstream out;
  if (kind_ == Kind::Fixed) {
    out << "fixed:" << value_;
  } else if (value_ == 1.0) {
    out << "plugin";
  } else {
    out << "plugin:" << value_;
  }
  return out.str();
}

Vector residualized_outcome(const Dataset& data, const Vector& beta) {
  if (beta.size() != data.X.cols()) fail(ErrorKind::InvalidArgument, "beta has the wrong dimension");
  if (!beta.allFinite()) fail(ErrorKind::InvalidArgument, "beta is not finite");
  return data.d.cwiseProduct(data.y - data.X * beta);
}

namespace {

struct WindowSums {
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  std::size_t count = 0;
  double lo = 0, hi = 0;
};

WindowSums accumulate(std::span<const double> ranks, std::span<const double> w, const KernelSpec& kernel,
                      double h) {
  WindowSums s;
  bool first = true;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const double x = ranks[i] - 1.0;
    const double k = kernel(x / h);
    if (k == 0.0) continue;
    s.s0 += k;
    s.s1 += k * x;
    s.s2 += k * x * x;
    s.t0 += k * w[i];
    s.t1 += k * x * w[i];
    ++s.count;
    if (first) {
      s.lo = s.hi = x;
      first = false;
    } else {
      s.lo = std::min(s.lo, x);
      s.hi = std::max(s.hi, x);
    }
  }
  return s;
}

void check_inputs(std::span<const double> ranks, std::span<const double> w, double h) {
  if (ranks.size() != w.size()) fail(ErrorKind::InvalidArgument, "ranks and outcomes differ in length");
  if (ranks.size() < 2) fail(ErrorKind::InsufficientSample, "need at least 2 observations");
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidArgument, "bandwidth must be positive");
}

}  // namespace

LocalLinearFit local_linear_at_boundary(std::span<const double> ranks, std::span<const double> w,
                                        const KernelSpec& kernel, double h) {
  check_inputs(ranks, w, h);
  const WindowSums s = accumulate(ranks, w, kernel, h);
  if (s.count == 0)
    fail(ErrorKind::NoEffectiveObservations, "no ranks within bandwidth " + std::to_string(h) + " of 1");
  if (s.lo == s.hi)
    fail(ErrorKind::DegenerateLocalDesign, "all ranks within bandwidth " + std::to_string(h) + " coincide");
  const double det = s.s0 * s.s2 - s.s1 * s.s1;
  if (!(std::abs(det) > 1e-14 * std::abs(s.s0 * s.s2)))
    fail(ErrorKind::DegenerateLocalDesign, "local normal matrix is singular");

  LocalLinearFit fit;
  fit.intercept = (s.s2 * s.t0 - s.s1 * s.t1) / det;
  fit.slope = (s.s0 * s.t1 - s.s1 * s.t0) / det;
  fit.effective_n = s.count;
  fit.bandwidth = h;
  double rss = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const double x = ranks[i] - 1.0;
    const double k = kernel(x / h);
    if (k == 0.0) continue;
    const double e = w[i] - fit.intercept - fit.slope * x;
    rss += k * e * e;
  }
  fit.sigma2 = std::max(0.0, rss / s.s0);
  return fit;
}

LocalLinearFit local_linear_with_fallback(std::span<const double> ranks, std::span<const double> w,
                                          const KernelSpec& kernel, double h) {
  check_inputs(ranks, w, h);
  const double cap = std::max(h, kMaxPlugInBandwidth);
  for (;;) {
    const WindowSums s = accumulate(ranks, w, kernel, h);
    if ((s.count > 0 && s.lo != s.hi) || h >= cap) break;
    h = std::min(h * kWindowWidening, cap);
  }
  return local_linear_at_boundary(ranks, w, kernel, h);
}

namespace {

double factorial(int p) {
  double f = 1.0;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

}  // namespace

double plug_in_bandwidth(std::span<const double> ranks, std::span<const double> w, const KernelSpec& kernel) {
  check_inputs(ranks, w, 1.0);
  const std::size_t n = ranks.size();
  if (n < 30) fail(ErrorKind::InsufficientSample, "plug-in bandwidth needs n >= 30");
  const int p = kernel.order();
  const int degree = p + 2;

  Matrix design(static_cast<Eigen::Index>(n), degree + 1);
  Vector rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ranks[i] - 1.0;
    double power = 1.0;
    for (int j = 0; j <= degree; ++j) {
      design(static_cast<Eigen::Index>(i), j) = power;
      power *= x;
    }
    rhs[static_cast<Eigen::Index>(i)] = w[i];
  }
  const Vector coef = design.colPivHouseholderQr().solve(rhs);
  const double derivative = factorial(p) * coef[p];

  const double sigma2 = local_linear_with_fallback(ranks, w, kernel, kMaxPlugInBandwidth).sigma2;
  const KernelConstants kc = kernel_constants(kernel);

  // A pilot derivative at rounding level means no detectable curvature.
  const double scale = std::sqrt(rhs.squaredNorm() / static_cast<double>(n));
  if (!std::isfinite(derivative) || std::abs(derivative) <= 1e-9 * (1.0 + scale)) return kMaxPlugInBandwidth;
  const double denom = 2.0 * p * kc.moment_p * kc.moment_p * derivative * derivative * static_cast<double>(n);
  if (!(denom > 0.0)) return kMaxPlugInBandwidth;
  const double pf = factorial(p);
  const double h = std::pow(pf * pf * sigma2 * kc.l2 / denom, 1.0 / (2.0 * p + 1.0));
  if (!std::isfinite(h)) return kMaxPlugInBandwidth;
  return std::clamp(h, kMinPlugInBandwidth, kMaxPlugInBandwidth);
}

double plug_in_bandwidth(const Dataset& data, const Vector& beta, const Vector& gamma,
                         const KernelSpec& kernel) {
  const IndexRanks ranks = eta_hat(data.Z, gamma);
  const Vector w = residualized_outcome(data, beta);
  return plug_in_bandwidth(ranks.values, std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
                           kernel);
}

double undersmoothing_bandwidth(std::size_t n, int p, double c) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  if (!(c > 0.0)) fail(ErrorKind::InvalidArgument, "bandwidth constant must be positive");
  return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * p + 1.0));
}

InterceptEstimate snn_intercept(std::span<const double> ranks, std::span<const double> w,
                                const KernelSpec& kernel, const BandwidthRule& rule) {
  const double h = rule.kind() == BandwidthRule::Kind::Fixed ? rule.value()
                                                              : rule.value() * plug_in_bandwidth(ranks, w, kernel);
  const LocalLinearFit fit = local_linear_with_fallback(ranks, w, kernel, h);
  const double l2 = kernel_constants(kernel).l2;
  InterceptEstimate out;
  out.theta = fit.intercept;
  out.bandwidth = fit.bandwidth;
  out.effective_n = fit.effective_n;
  out.std_error = std::sqrt(fit.sigma2 * l2 / (static_cast<double>(ranks.size()) * fit.bandwidth));
  out.method = "snn";
  return out;
}

InterceptEstimate snn_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                const KernelSpec& kernel, const BandwidthRule& rule) {
  const IndexRanks ranks = eta_hat(data.Z, gamma);
  const Vector w = residualized_outcome(data, beta);
  return snn_intercept(ranks.values, std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), kernel,
                       rule);
}

}  // namespace selint
