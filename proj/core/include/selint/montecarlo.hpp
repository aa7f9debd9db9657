#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selint/baselines.hpp"
#include "selint/dgp.hpp"
#include "selint/nuisance.hpp"
#include "selint/numerics.hpp"
#include "selint/snn_estimator.hpp"

namespace selint {

enum class EstimatorKind { Snn, Ols, Heckman, H90, As98 };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& text);

enum class NuisanceMode { Pinned, Estimated };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Snn;
  KernelSpec kernel{};
  BandwidthRule bandwidth = BandwidthRule::plug_in(1.0);
  TailRule tail{};
  NuisanceMode nuisance = NuisanceMode::Pinned;
  NuisanceConfig nuisance_config{};

  std::string label() const;
};

/// Applies the configured estimator to one simulated draw and returns theta.
/// Throws selint::Error when the estimator fails on this draw.
double estimate_theta(const LatentDraw& draw, const DgpSpec& spec, const EstimatorConfig& config);

using DrawEstimator = std::function<double(const LatentDraw&)>;

struct CellStats {
  double sq_bias = 0.0;
  double sd = 0.0;
  double rmse_scaled = 0.0;  // sqrt(n) * sqrt(sq_bias + sd^2)
  std::size_t reps_ok = 0;
  std::size_t reps_failed = 0;

  // Any failed replication marks the cell unstable; with reps_ok == 0 the
  // statistics are NaN.
  bool unstable() const noexcept { return reps_failed > 0; }
};

/// Summary of per-replication estimates against the true intercept.
CellStats summarize(std::span<const double> estimates, std::size_t failures, double theta0,
                    std::size_t n);

struct RunOptions {
  std::size_t workers = 1;
};

/// Replication r draws from seed derive_seed(base_seed, spec.cell_label(), r);
/// spec.seed is ignored.
CellStats run_cell(const DgpSpec& spec, const EstimatorConfig& config, std::size_t reps,
                   std::uint64_t base_seed, const RunOptions& options = {});

CellStats run_cell(const DgpSpec& spec, const DrawEstimator& estimator, std::size_t reps,
                   std::uint64_t base_seed, const RunOptions& options = {});

/// Several estimators on the same replicated draws.
std::vector<CellStats> run_cell_panels(const DgpSpec& spec, std::span<const DrawEstimator> estimators,
                                       std::size_t reps, std::uint64_t base_seed,
                                       const RunOptions& options = {});

struct Panel {
  std::string label;
  EstimatorConfig config;
};

struct TablePlan {
  DgpFamily family = DgpFamily::Dgp1;
  std::vector<double> rhos{0.0, 0.25, 0.5, 0.75, 0.95};
  std::vector<double> alphas{2.0, 1.5, 1.25, 1.0};
  std::vector<Panel> panels;
  std::size_t l = 7;
  std::size_t k = 4;
  double theta0 = 1.0;
};

struct MonteCarloReport {
  DgpFamily family = DgpFamily::Dgp1;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> rhos;
  std::vector<double> alphas;
  std::vector<std::string> panel_labels;
  // cells[panel][rho_index][alpha_index]
  std::vector<std::vector<std::vector<CellStats>>> cells;

  const CellStats& at(std::size_t panel, std::size_t rho_index, std::size_t alpha_index) const {
    return cells.at(panel).at(rho_index).at(alpha_index);
  }
};

MonteCarloReport run_table(const TablePlan& plan, std::size_t n, std::size_t reps,
                           std::uint64_t base_seed, const RunOptions& options = {});

/// Estimator used by rate_check: receives the draw and the bandwidth of the
/// undersmoothing schedule at that draw's n.
using RateEstimator = std::function<double(const LatentDraw&, double bandwidth)>;

struct RatePoint {
  std::size_t n = 0;
  double bandwidth = 0.0;
  double rmse = 0.0;
  CellStats stats;
};

struct RateCheckResult {
  double slope = 0.0;
  std::vector<RatePoint> points;
};

/// Least-squares slope of log RMSE on log n with h_n = c n^(-1/(2p+1)).
RateCheckResult rate_check(std::span<const std::size_t> ns, const DgpSpec& spec_template,
                           const RateEstimator& estimator, int p, double c, std::size_t reps,
                           std::uint64_t base_seed, const RunOptions& options = {});

/// The SNN estimator with pinned nuisance parameters, for rate_check.
RateEstimator snn_rate_estimator(const DgpSpec& spec_template, const KernelSpec& kernel);

/// Slope of the least-squares line through (x, y).
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace selint
