#include "selint/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "selint/error.hpp"
#include "selint/rng.hpp"

namespace selint {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Snn: return "snn";
    case EstimatorKind::Ols: return "ols";
    case EstimatorKind::Heckman: return "heckman";
    case EstimatorKind::H90: return "h90";
    case EstimatorKind::As98: return "as98";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& text) {
  for (auto kind : {EstimatorKind::Snn, EstimatorKind::Ols, EstimatorKind::Heckman, EstimatorKind::H90,
                    EstimatorKind::As98})
    if (text == to_string(kind)) return kind;
  fail(ErrorKind::InvalidArgument, "unknown estimator '" + text + "' (valid: snn, ols, heckman, h90, as98)");
}

std::string EstimatorConfig::label() const {
  std::ostringstream out;
  out << to_string(kind);
  if (kind == EstimatorKind::Snn) out << "[p=" << kernel.order() << "," << bandwidth.describe() << "]";
  if (kind == EstimatorKind::H90) out << "[q=" << tail.quantile << "]";
  if (kind == EstimatorKind::As98) out << "[q=" << tail.quantile << ",tau=" << tail.tau_quantile << "]";
  if (nuisance == NuisanceMode::Estimated && (kind == EstimatorKind::Snn || kind == EstimatorKind::H90 ||
                                              kind == EstimatorKind::As98))
    out << "[estimated nuisance]";
  return out.str();
}

double estimate_theta(const LatentDraw& draw, const DgpSpec& spec, const EstimatorConfig& config) {
  const Dataset& data = draw.dataset;
  if (config.kind == EstimatorKind::Ols) return ols_selected(data).theta;
  if (config.kind == EstimatorKind::Heckman) return heckman_two_step(data).theta;

  Vector beta, gamma;
  if (config.nuisance == NuisanceMode::Pinned) {
    beta = true_beta(spec);
    gamma = true_gamma(spec);
  } else {
    NuisanceEstimates est = estimate_nuisance(data, config.nuisance_config);
    beta = std::move(est.beta);
    gamma = std::move(est.gamma);
  }
  switch (config.kind) {
    case EstimatorKind::Snn: return snn_intercept(data, beta, gamma, config.kernel, config.bandwidth).theta;
    case EstimatorKind::H90: return h90_intercept(data, beta, gamma, config.tail).theta;
    case EstimatorKind::As98: return as98_intercept(data, beta, gamma, config.tail).theta;
    default: break;
  }
  fail(ErrorKind::InvalidArgument, "unsupported estimator");
}

CellStats summarize(std::span<const double> estimates, std::size_t failures, double theta0, std::size_t n) {
  CellStats stats;
  stats.reps_ok = estimates.size();
  stats.reps_failed = failures;
  if (estimates.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stats.sq_bias = stats.sd = stats.rmse_scaled = nan;
    return stats;
  }
  const double bias = mean(estimates) - theta0;
  stats.sq_bias = bias * bias;
  stats.sd = sample_sd(estimates);
  stats.rmse_scaled = std::sqrt(static_cast<double>(n)) * std::sqrt(stats.sq_bias + stats.sd * stats.sd);
  return stats;
}


std::vector<CellStats> run_cell_panels(const DgpSpec& spec, std::span<const DrawEstimator> estimators,
                                       std::size_t reps, std::uint64_t base_seed, const RunOptions& options) {
  spec.validate();
  if (reps < 2) fail(ErrorKind::InvalidArgument, "need at least 2 replications");
  if (estimators.empty()) fail(ErrorKind::InvalidArgument, "no estimators configured");
  const std::size_t m = estimators.size();
  const std::string label = spec.cell_label();
  // estimates[r * m + e]; NaN marks a failed replication.
  std::vector<double> estimates(reps * m, std::numeric_limits<double>::quiet_NaN());
  detail::parallel_for(reps, options.workers, [&](std::size_t r) {
    DgpSpec rep_spec = spec;
    rep_spec.seed = derive_seed(base_seed, label, r);
    const LatentDraw draw = simulate(rep_spec);
    for (std::size_t e = 0; e < m; ++e) {
      try {
        const double theta = estimators[e](draw);
        if (std::isfinite(theta)) estimates[r * m + e] = theta;
      } catch (const Error&) {
      }
    }
  });

  std::vector<CellStats> out;
  out.reserve(m);
  std::vector<double> ok;
  for (std::size_t e = 0; e < m; ++e) {
    ok.clear();
    for (std::size_t r = 0; r < reps; ++r)
      if (!std::isnan(estimates[r * m + e])) ok.push_back(estimates[r * m + e]);
    out.push_back(summarize(ok, reps - ok.size(), spec.theta0, spec.n));
  }
  return out;
}

CellStats run_cell(const DgpSpec& spec, const DrawEstimator& estimator, std::size_t reps, std::uint64_t base_seed,
                   const RunOptions& options) {
  return run_cell_panels(spec, std::span<const DrawEstimator>(&estimator, 1), reps, base_seed, options).front();
}

CellStats run_cell(const DgpSpec& spec, const EstimatorConfig& config, std::size_t reps, std::uint64_t base_seed,
                   const RunOptions& options) {
  const DrawEstimator estimator = [&](const LatentDraw& draw) { return estimate_theta(draw, spec, config); };
  return run_cell(spec, estimator, reps, base_seed, options);
}

MonteCarloReport run_table(const TablePlan& plan, std::size_t n, std::size_t reps, std::uint64_t base_seed,
                           const RunOptions& options) {
  if (plan.panels.empty() || plan.rhos.empty() || plan.alphas.empty())
    fail(ErrorKind::InvalidArgument, "empty Monte Carlo plan");
  MonteCarloReport report;
  report.family = plan.family;
  report.n = n;
  report.reps = reps;
  report.base_seed = base_seed;
  report.rhos = plan.rhos;
  report.alphas = plan.alphas;
  for (const Panel& panel : plan.panels) report.panel_labels.push_back(panel.label);
  report.cells.assign(plan.panels.size(),
                      std::vector<std::vector<CellStats>>(plan.rhos.size(), std::vector<CellStats>(plan.alphas.size())));

  for (std::size_t ri = 0; ri < plan.rhos.size(); ++ri) {
    for (std::size_t ai = 0; ai < plan.alphas.size(); ++ai) {
      DgpSpec spec;
      spec.family = plan.family;
      spec.n = n;
      spec.rho = plan.rhos[ri];
      spec.alpha = plan.alphas[ai];
      spec.l = plan.l;
      spec.k = plan.k;
      spec.theta0 = plan.theta0;
      std::vector<DrawEstimator> estimators;
      for (const Panel& panel : plan.panels) {
        estimators.emplace_back([spec, config = panel.config](const LatentDraw& draw) {
          return estimate_theta(draw, spec, config);
        });
      }
      const auto stats = run_cell_panels(spec, estimators, reps, base_seed, options);
      for (std::size_t p = 0; p < stats.size(); ++p) report.cells[p][ri][ai] = stats[p];
    }
  }
  return report;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::InvalidArgument, "slope needs at least 2 points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::InvalidArgument, "slope needs distinct x values");
  return sxy / sxx;
}

RateCheckResult rate_check(std::span<const std::size_t> ns, const DgpSpec& spec_template,
                           const RateEstimator& estimator, int p, double c, std::size_t reps,
                           std::uint64_t base_seed, const RunOptions& options) {
  if (ns.size() < 3) fail(ErrorKind::InvalidArgument, "rate check needs at least 3 sample sizes");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) fail(ErrorKind::InvalidArgument, "sample sizes must be increasing");

  RateCheckResult result;
  std::vector<double> log_n, log_rmse;
  for (std::size_t n : ns) {
    DgpSpec spec = spec_template;
    spec.n = n;
    const double h = undersmoothing_bandwidth(n, p, c);
    const DrawEstimator at_h = [&](const LatentDraw& draw) { return estimator(draw, h); };
    const CellStats stats = run_cell(spec, at_h, reps, base_seed, options);
    if (stats.reps_ok == 0)
      fail(ErrorKind::RateCheckFailed, "every replication failed at n=" + std::to_string(n));
    const double rmse = stats.rmse_scaled / std::sqrt(static_cast<double>(n));
    result.points.push_back({n, h, rmse, stats});
    log_n.push_back(std::log(static_cast<double>(n)));
    log_rmse.push_back(std::log(rmse));
  }
  result.slope = least_squares_slope(log_n, log_rmse);
  return result;
}

RateEstimator snn_rate_estimator(const DgpSpec& spec_template, const KernelSpec& kernel) {
  return [spec_template, kernel](const LatentDraw& draw, double h) {
    DgpSpec spec = spec_template;
    spec.n = draw.dataset.n();
    return snn_intercept(draw.dataset, true_beta(spec), true_gamma(spec), kernel, BandwidthRule::fixed(h)).theta;
  };
}

}  // namespace selint
