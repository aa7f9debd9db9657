#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "selint/baselines.hpp"
#include "selint/dataset.hpp"
#include "selint/nuisance.hpp"
#include "selint/snn_estimator.hpp"

namespace selint {

enum class Weighting {
  Group0Weights,  // A uses group-0 endowments, B prices endowments with beta_1
  Group1Weights,  // A uses group-1 endowments, B prices endowments with beta_0
};

enum class InterceptMethod { Snn, H90, As98, Ols, Heckman };

std::string to_string(InterceptMethod method);
InterceptMethod parse_intercept_method(const std::string& text);

struct DecompositionConfig {
  InterceptMethod method = InterceptMethod::Snn;
  KernelSpec kernel{};
  BandwidthRule bandwidth = BandwidthRule::plug_in(1.0);
  TailRule tail{};
  NuisanceConfig nuisance{};
  Weighting weighting = Weighting::Group0Weights;
};

struct GroupFit {
  NuisanceEstimates nuisance;
  InterceptEstimate intercept;
  double mean_y = 0.0;  // over d = 1
  Vector mean_x;        // over d = 1
};

/// Log-wage gap decomposition gap = A + B + C with C the residual.
struct DecompositionReport {
  double gap_overall = 0.0;
  double component_A = 0.0;
  double component_B = 0.0;
  double component_C = 0.0;
  double gap_selection_corrected = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double intercept_difference = 0.0;
  // Both conventions, as printed side by side in decomposition tables.
  double endowment_group0_weights = 0.0;    // (X1 - X0)' beta1
  double endowment_group1_weights = 0.0;    // (X1 - X0)' beta0
  double coefficients_group0_weights = 0.0;  // X0' (beta1 - beta0)
  double coefficients_group1_weights = 0.0;  // X1' (beta1 - beta0)
  Weighting weighting = Weighting::Group0Weights;
  GroupFit group0;
  GroupFit group1;

  // Bootstrap standard errors, filled by bootstrap_decomposition.
  std::vector<double> bootstrap_se;
  std::size_t bootstrap_B = 0;
  std::size_t bootstrap_failed = 0;
};

/// Order of the quantities returned by decomposition_quantities and of
/// DecompositionReport::bootstrap_se.
const std::vector<std::string>& decomposition_quantity_names();
std::vector<double> decomposition_quantities(const DecompositionReport& report);

/// Combines two fitted groups into the decomposition.
DecompositionReport combine_groups(GroupFit group0, GroupFit group1, Weighting weighting);

GroupFit fit_group(const Dataset& data, const DecompositionConfig& config);

DecompositionReport decompose(const Dataset& data0, const Dataset& data1,
                              const DecompositionConfig& config);

using GroupStatistic = std::function<std::vector<double>(const Dataset&, const Dataset&)>;

struct BootstrapResult {
  std::vector<double> se;
  std::size_t reps_ok = 0;
  std::size_t reps_failed = 0;
  std::vector<std::vector<double>> replicates;  // successful replications, in order
};

/// Resamples rows with replacement independently within each group and
/// reports the standard deviation of each statistic across successful
/// replications. Throws BootstrapFailed when fewer than two succeed.
BootstrapResult bootstrap_se(const Dataset& data0, const Dataset& data1,
                             const GroupStatistic& statistic, std::size_t B, std::uint64_t seed,
                             std::size_t workers = 1);

BootstrapResult bootstrap_se(const Dataset& data0, const Dataset& data1,
                             const DecompositionConfig& config, std::size_t B, std::uint64_t seed,
                             std::size_t workers = 1);

/// Point decomposition plus bootstrap standard errors for every quantity.
DecompositionReport bootstrap_decomposition(const Dataset& data0, const Dataset& data1,
                                            const DecompositionConfig& config, std::size_t B,
                                            std::uint64_t seed, std::size_t workers = 1);

/// Table with rows overall gap, endowment terms, selection-corrected gap,
/// coefficient terms and difference in intercepts; SEs in parentheses.
void print_decomposition_table(std::ostream& out, const DecompositionReport& report);

}  // namespace selint
