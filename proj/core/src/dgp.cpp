#include "selint/dgp.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "selint/rng.hpp"

namespace selint {

std::string to_string(DgpFamily family) { return family == DgpFamily::Dgp1 ? "dgp1" : "dgp2"; }

DgpFamily parse_dgp_family(const std::string& text) {
  if (text == "dgp1" || text == "1") return DgpFamily::Dgp1;
  if (text == "dgp2" || text == "2") return DgpFamily::Dgp2;
  fail(ErrorKind::InvalidArgument, "unknown DGP '" + text + "' (valid: dgp1, dgp2)");
}

void DgpSpec::validate() const {
  if (n < 2) fail(ErrorKind::InvalidArgument, "n must be at least 2");
  if (!(rho >= -1.0 && rho <= 1.0)) fail(ErrorKind::InvalidArgument, "rho must lie in [-1, 1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidArgument, "alpha must be positive");
  if (l < 1 || k < 1 || k >= l) fail(ErrorKind::InvalidArgument, "need 1 <= k < l");
  if (!std::isfinite(theta0)) fail(ErrorKind::InvalidArgument, "theta0 must be finite");
}

std::string DgpSpec::cell_label() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(family) << "|n=" << n << "|rho=" << rho << "|alpha=" << alpha << "|l=" << l << "|k=" << k
      << "|theta0=" << theta0;
  return out.str();
}

Vector true_gamma(const DgpSpec& spec) {
  const auto l = static_cast<Eigen::Index>(spec.l);
  if (spec.family == DgpFamily::Dgp1) return Vector::Constant(l, std::sqrt(spec.alpha / static_cast<double>(spec.l)));
  Vector g = Vector::Zero(l);
  g[l - 1] = 1.0;
  return g;
}

Vector true_beta(const DgpSpec& spec) { return Vector::Ones(static_cast<Eigen::Index>(spec.k)); }

double true_intercept(const DgpSpec& spec) noexcept { return spec.theta0; }

LatentDraw simulate(const DgpSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto l = static_cast<Eigen::Index>(spec.l);
  const auto k = static_cast<Eigen::Index>(spec.k);
  const Vector gamma = true_gamma(spec);
  const double e_scale = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
  const bool normal = spec.family == DgpFamily::Dgp1;

  Philox rng(spec.seed);
  LatentDraw draw;
  Dataset& data = draw.dataset;
  data.Z.resize(n, l);
  data.d.resize(n);
  data.y.resize(n);
  draw.u.resize(n);
  draw.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) data.Z(i, j) = normal ? rng.normal() : rng.cauchy();
    draw.v[i] = normal ? rng.normal() : rng.pareto(spec.alpha);
    draw.u[i] = spec.rho * draw.v[i] + e_scale * rng.normal();
  }
  data.X = data.Z.leftCols(k);
  draw.index = data.Z * gamma;
  const Vector beta = true_beta(spec);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.d[i] = draw.index[i] >= draw.v[i] ? 1.0 : 0.0;
    data.y[i] = data.d[i] * (spec.theta0 + data.X.row(i).dot(beta) + draw.u[i]);
  }
  return draw;
}

double identification_ratio(DgpFamily family, double alpha, double q) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
  if (q < 1e-9 || q > 1.0 - 1e-9)
    fail(ErrorKind::OutOfNumericRange, "q within 1e-9 of an endpoint; the index quantile is not representable");
  double log_ratio;
  if (family == DgpFamily::Dgp1) {
    const double x = std::sqrt(alpha) * normal_quantile(q);
    log_ratio = 0.5 * std::log(alpha) - 0.5 * x * x + 0.5 * x * x / alpha;
  } else {
    const double v = q > 0.5 ? 1.0 / std::tan(std::numbers::pi * (1.0 - q)) : std::tan(std::numbers::pi * (q - 0.5));
    if (!std::isfinite(v)) fail(ErrorKind::OutOfNumericRange, "Cauchy quantile overflow");
    if (v < 1.0) return 0.0;
    const double log_v = std::log(v);
    log_ratio = std::log(alpha) - (alpha + 1.0) * log_v + std::log(std::numbers::pi) + 2.0 * log_v +
                std::log1p(1.0 / (v * v));
  }
  if (log_ratio > std::log(DBL_MAX)) fail(ErrorKind::OutOfNumericRange, "identification ratio overflows");
  return std::exp(log_ratio);
}

}  // namespace selint
