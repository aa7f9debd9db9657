#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "selint/dataset.hpp"
#include "selint/numerics.hpp"
#include "selint/transform.hpp"

namespace selint {

/// Either a fixed bandwidth h in (0, 1] or a multiple of the plug-in
/// MSE-optimal bandwidth.
class BandwidthRule {
 public:
  enum class Kind { Fixed, PlugIn };

  static BandwidthRule fixed(double h);
  static BandwidthRule plug_in(double scale = 1.0);

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

  std::string describe() const;

 private:
  BandwidthRule(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

struct InterceptEstimate {
  double theta = 0.0;
  double std_error = 0.0;
  double bandwidth = 0.0;
  std::size_t effective_n = 0;
  std::string method;
};

// Lower clamp, upper clamp and widening factor for the plug-in bandwidth.
inline constexpr double kMinPlugInBandwidth = 0.05;
inline constexpr double kMaxPlugInBandwidth = 0.5;
inline constexpr double kWindowWidening = 1.5;

/// W_i = d_i (y_i - X_i' beta).
Vector residualized_outcome(const Dataset& data, const Vector& beta);

/// Kernel-weighted linear fit of W on (eta - 1) evaluated at eta = 1.
struct LocalLinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sigma2 = 0.0;  // kernel-weighted mean squared residual
  std::size_t effective_n = 0;
  double bandwidth = 0.0;
};

/// Fits at exactly bandwidth h; throws on an empty or degenerate window.
LocalLinearFit local_linear_at_boundary(std::span<const double> ranks, std::span<const double> w,
                                        const KernelSpec& kernel, double h);

/// As above, widening h by kWindowWidening (up to max(h, kMaxPlugInBandwidth))
/// while the window holds fewer than two distinct ranks.
LocalLinearFit local_linear_with_fallback(std::span<const double> ranks, std::span<const double> w,
                                          const KernelSpec& kernel, double h);

/// Plug-in bandwidth from ranks and residualized outcomes.
double plug_in_bandwidth(std::span<const double> ranks, std::span<const double> w,
                         const KernelSpec& kernel);

double plug_in_bandwidth(const Dataset& data, const Vector& beta, const Vector& gamma,
                         const KernelSpec& kernel);

/// Rate-optimal schedule c n^(-1/(2p+1)).
double undersmoothing_bandwidth(std::size_t n, int p, double c);

/// Locally linear symmetrized-nearest-neighbour estimate of the intercept
/// from precomputed ranks and residualized outcomes.
InterceptEstimate snn_intercept(std::span<const double> ranks, std::span<const double> w,
                                const KernelSpec& kernel, const BandwidthRule& rule);

InterceptEstimate snn_intercept(const Dataset& data, const Vector& beta, const Vector& gamma,
                                const KernelSpec& kernel, const BandwidthRule& rule);

}  // namespace selint
