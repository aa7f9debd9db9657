#pragma once

#include <string>

#include "selint/baselines.hpp"
#include "selint/dataset.hpp"

namespace selint {

struct NuisanceEstimates {
  Vector beta;
  Vector gamma;  // gamma[0] == 1
  std::string beta_method;
  std::string gamma_method;
};

/// Probit coefficients divided by the first one. The first coefficient must
/// be distinguishable from zero (|coef| > 1e-8 and more than two standard
/// errors) for the normalization to exist.
Vector probit_gamma(const Dataset& data);

/// c * sd(index) * n^(-1/5).
double silverman_bandwidth(std::span<const double> index, double c = 1.06);

/// Klein-Spady quasi log-likelihood at gamma with leave-one-out Epanechnikov
/// Nadaraya-Watson choice probabilities clipped to [1e-4, 1 - 1e-4].
double klein_spady_objective(const Dataset& data, const Vector& gamma, double bandwidth);

struct KleinSpadyOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;
};

/// Maximizes the Klein-Spady objective over {gamma : gamma[0] = 1} with
/// Nelder-Mead, started from the normalized probit estimate.
Vector klein_spady_gamma(const Dataset& data, double pilot_bandwidth,
                         const KleinSpadyOptions& options = {});

/// Robinson double-residual slopes over the selected rows, conditioning on
/// the index Z gamma through leave-one-out Epanechnikov regressions.
Vector robinson_beta(const Dataset& data, const Vector& gamma, double bandwidth);

enum class GammaMethod { Probit, KleinSpady };

struct NuisanceConfig {
  GammaMethod gamma_method = GammaMethod::KleinSpady;
  double bandwidth_constant = 1.06;
};

/// gamma by the configured method, then Robinson beta, both with
/// rule-of-thumb bandwidths.
NuisanceEstimates estimate_nuisance(const Dataset& data, const NuisanceConfig& config = {});

}  // namespace selint
