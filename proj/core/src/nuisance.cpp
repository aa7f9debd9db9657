#include "selint/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "selint/transform.hpp"

namespace selint {

namespace {

constexpr double kProbClip = 1e-4;

double epanechnikov(double u) { return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

std::vector<std::size_t> sort_order(const std::vector<double>& t) {
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  return order;
}

// Calls visit(i, j, weight) for every ordered pair i != j whose indices lie
// within one bandwidth of each other.
template <class Visit>
void for_each_neighbour(const std::vector<double>& t, double bw, Visit&& visit) {
  const auto order = sort_order(t);
  const std::size_t n = t.size();
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t i = order[pos];
    while (t[order[lo]] <= t[i] - bw) ++lo;
    if (hi < pos) hi = pos;
    while (hi + 1 < n && t[order[hi + 1]] < t[i] + bw) ++hi;
    for (std::size_t q = lo; q <= hi; ++q) {
      if (q == pos) continue;
      const std::size_t j = order[q];
      const double k = epanechnikov((t[j] - t[i]) / bw);
      if (k > 0.0) visit(i, j, k);
    }
  }
}

void check_bandwidth(double bw) {
  if (!(bw > 0.0) || !std::isfinite(bw)) fail(ErrorKind::InvalidArgument, "bandwidth must be positive and finite");
}

}  // namespace

Vector probit_gamma(const Dataset& data) {
  data.validate();
  const ProbitFit fit = probit_mle(data.d, data.Z);
  const double lead = fit.coef[0];
  if (std::abs(lead) < 1e-8 || std::abs(lead) < 2.0 * fit.std_errors[0])
    fail(ErrorKind::NormalizationImpossible,
         "first selection coefficient " + std::to_string(lead) + " is not distinguishable from zero");
  return fit.coef / lead;
}

double silverman_bandwidth(std::span<const double> index, double c) {
  if (!(c > 0.0)) fail(ErrorKind::InvalidArgument, "bandwidth constant must be positive");
  const double sd = sample_sd(index);
  if (!(sd > 0.0)) fail(ErrorKind::DegenerateIndex, "index has no spread");
  return c * sd * std::pow(static_cast<double>(index.size()), -0.2);
}

double klein_spady_objective(const Dataset& data, const Vector& gamma, double bandwidth) {
  check_bandwidth(bandwidth);
  const Vector index = selection_index(data.Z, gamma);
  const std::vector<double> t(index.data(), index.data() + index.size());
  const std::size_t n = t.size();
  std::vector<double> num(n, 0.0), den(n, 0.0);
  for_each_neighbour(t, bandwidth, [&](std::size_t i, std::size_t j, double k) {
    num[i] += k * data.d[static_cast<Eigen::Index>(j)];
    den[i] += k;
  });
  const double share = data.d.mean();
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = den[i] > 0.0 ? num[i] / den[i] : share;
    p = std::clamp(p, kProbClip, 1.0 - kProbClip);
    ll += data.d[static_cast<Eigen::Index>(i)] == 1.0 ? std::log(p) : std::log(1.0 - p);
  }
  return ll;
}

namespace {

Vector with_leading_one(const Vector& free) {
  Vector g(free.size() + 1);
  g[0] = 1.0;
  g.tail(free.size()) = free;
  return g;
}

}  // namespace

Vector klein_spady_gamma(const Dataset& data, double pilot_bandwidth, const KleinSpadyOptions& options) {
  data.validate();
  check_bandwidth(pilot_bandwidth);
  const double ones = data.d.sum();
  if (ones == 0.0 || ones == static_cast<double>(data.n()))
    fail(ErrorKind::DegenerateOutcome, "selection indicator is constant");
  const Vector start = probit_gamma(data);
  const auto dim = start.size() - 1;
  if (dim == 0) return start;

  auto cost = [&](const Vector& free) { return -klein_spady_objective(data, with_leading_one(free), pilot_bandwidth); };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(start.tail(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    Vector v = simplex.front();
    v[j] += std::max(0.1 * std::abs(v[j]), 0.05);
    simplex.push_back(v);
  }
  for (const Vector& v : simplex) values.push_back(cost(v));

  const double x_tol = std::sqrt(options.tolerance);
  std::vector<std::size_t> order(simplex.size());
  bool converged = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double f_spread = 0.0;
    double x_spread = 0.0;
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      f_spread = std::max(f_spread, std::abs(values[i] - values[best]));
      x_spread = std::max(x_spread, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    }
    if (f_spread <= options.tolerance * (1.0 + std::abs(values[best])) &&
        x_spread <= x_tol * (1.0 + simplex[best].cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(dim);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double f_r = cost(reflected);
    if (f_r < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_e = cost(expanded);
      if (f_e < f_r) {
        simplex[worst] = expanded;
        values[worst] = f_e;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_r;
      }
      continue;
    }
    if (f_r < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_r;
      continue;
    }
    const bool outside = f_r < values[worst];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_c = cost(contracted);
    if (f_c < (outside ? f_r : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_c;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = cost(simplex[i]);
    }
  }
  if (!converged)
    fail(ErrorKind::NoConvergence,
         "Nelder-Mead did not converge within " + std::to_string(options.max_iterations) + " iterations");
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return with_leading_one(simplex[best]);
}

Vector robinson_beta(const Dataset& data, const Vector& gamma, double bandwidth) {
  check_bandwidth(bandwidth);
  const Vector index = selection_index(data.Z, gamma);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < data.d.size(); ++i)
    if (data.d[i] == 1.0) rows.push_back(i);
  const auto k = data.X.cols();
  if (static_cast<Eigen::Index>(rows.size()) < k + 10)
    fail(ErrorKind::InsufficientSelected,
         std::to_string(rows.size()) + " selected observations for " + std::to_string(k) + " slopes");

  const std::size_t m = rows.size();
  std::vector<double> t(m);
  for (std::size_t r = 0; r < m; ++r) t[r] = index[rows[r]];
  Vector weight_sum = Vector::Zero(static_cast<Eigen::Index>(m));
  Vector y_smooth = Vector::Zero(static_cast<Eigen::Index>(m));
  Matrix x_smooth = Matrix::Zero(static_cast<Eigen::Index>(m), k);
  for_each_neighbour(t, bandwidth, [&](std::size_t i, std::size_t j, double w) {
    const auto ii = static_cast<Eigen::Index>(i);
    weight_sum[ii] += w;
    y_smooth[ii] += w * data.y[rows[j]];
    x_smooth.row(ii) += w * data.X.row(rows[j]);
  });

  std::vector<Eigen::Index> kept;
  for (std::size_t r = 0; r < m; ++r)
    if (weight_sum[static_cast<Eigen::Index>(r)] > 0.0) kept.push_back(static_cast<Eigen::Index>(r));
  if (static_cast<Eigen::Index>(kept.size()) <= k)
    fail(ErrorKind::SingularDesign, "too few observations have index neighbours");

  const auto used = static_cast<Eigen::Index>(kept.size());
  Matrix xr(used, k);
  Vector yr(used);
  for (Eigen::Index q = 0; q < used; ++q) {
    const Eigen::Index r = kept[static_cast<std::size_t>(q)];
    const Eigen::Index i = rows[static_cast<std::size_t>(r)];
    yr[q] = data.y[i] - y_smooth[r] / weight_sum[r];
    xr.row(q) = data.X.row(i) - x_smooth.row(r) / weight_sum[r];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(xr);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) fail(ErrorKind::SingularDesign, "residualized regressors are rank deficient");
  return qr.solve(yr);
}

NuisanceEstimates estimate_nuisance(const Dataset& data, const NuisanceConfig& config) {
  NuisanceEstimates out;
  if (config.gamma_method == GammaMethod::Probit) {
    out.gamma = probit_gamma(data);
    out.gamma_method = "probit";
  } else {
    const Vector pilot = probit_gamma(data);
    const Vector pilot_index = data.Z * pilot;
    const double bw = silverman_bandwidth(
        std::span<const double>(pilot_index.data(), static_cast<std::size_t>(pilot_index.size())),
        config.bandwidth_constant);
    out.gamma = klein_spady_gamma(data, bw);
    out.gamma_method = "klein-spady";
  }
  const Vector index = data.Z * out.gamma;
  std::vector<double> selected;
  for (Eigen::Index i = 0; i < index.size(); ++i)
    if (data.d[i] == 1.0) selected.push_back(index[i]);
  if (selected.size() < 2) fail(ErrorKind::InsufficientSelected, "fewer than 2 selected observations");
  out.beta = robinson_beta(data, out.gamma, silverman_bandwidth(selected, config.bandwidth_constant));
  out.beta_method = "robinson";
  return out;
}

}  // namespace selint
