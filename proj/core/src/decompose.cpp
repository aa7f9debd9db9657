#include "selint/decompose.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "parallel.hpp"
#include "selint/error.hpp"
#include "selint/numerics.hpp"
#include "selint/rng.hpp"

namespace selint {

std::string to_string(InterceptMethod method) {
  switch (method) {
    case InterceptMethod::Snn: return "snn";
    case InterceptMethod::H90: return "h90";
    case InterceptMethod::As98: return "as98";
    case InterceptMethod::Ols: return "ols";
    case InterceptMethod::Heckman: return "heckman";
  }
  return "unknown";
}

InterceptMethod parse_intercept_method(const std::string& text) {
  for (auto m : {InterceptMethod::Snn, InterceptMethod::H90, InterceptMethod::As98, InterceptMethod::Ols,
                 InterceptMethod::Heckman})
    if (text == to_string(m)) return m;
  fail(ErrorKind::InvalidArgument, "unknown estimator '" + text + "' (valid: snn, ols, heckman, h90, as98)");
}

const std::vector<std::string>& decomposition_quantity_names() {
  static const std::vector<std::string> names{
      "gap_overall",          "component_A",
      "component_B",          "component_C",
      "gap_selection_corrected", "theta0",
      "theta1",               "intercept_difference",
      "endowment_group0_weights", "endowment_group1_weights",
      "coefficients_group0_weights", "coefficients_group1_weights"};
  return names;
}

std::vector<double> decomposition_quantities(const DecompositionReport& r) {
  return {r.gap_overall,
          r.component_A,
          r.component_B,
          r.component_C,
          r.gap_selection_corrected,
          r.theta0,
          r.theta1,
          r.intercept_difference,
          r.endowment_group0_weights,
          r.endowment_group1_weights,
          r.coefficients_group0_weights,
          r.coefficients_group1_weights};
}

DecompositionReport combine_groups(GroupFit group0, GroupFit group1, Weighting weighting) {
  if (group0.mean_x.size() != group1.mean_x.size() || group0.nuisance.beta.size() != group0.mean_x.size() ||
      group1.nuisance.beta.size() != group1.mean_x.size())
    fail(ErrorKind::InvalidArgument, "groups have different outcome covariates");
  DecompositionReport r;
  r.weighting = weighting;
  const Vector& b0 = group0.nuisance.beta;
  const Vector& b1 = group1.nuisance.beta;
  const Vector dbeta = b1 - b0;
  const Vector dx = group1.mean_x - group0.mean_x;

  r.theta0 = group0.intercept.theta;
  r.theta1 = group1.intercept.theta;
  r.intercept_difference = r.theta1 - r.theta0;
  r.gap_overall = group1.mean_y - group0.mean_y;
  r.endowment_group0_weights = dx.dot(b1);
  r.endowment_group1_weights = dx.dot(b0);
  r.coefficients_group0_weights = group0.mean_x.dot(dbeta);
  r.coefficients_group1_weights = group1.mean_x.dot(dbeta);

  if (weighting == Weighting::Group0Weights) {
    r.component_A = r.intercept_difference + r.coefficients_group0_weights;
    r.component_B = r.endowment_group0_weights;
  } else {
    r.component_A = r.intercept_difference + r.coefficients_group1_weights;
    r.component_B = r.endowment_group1_weights;
  }
  r.component_C = r.gap_overall - r.component_A - r.component_B;
  r.gap_selection_corrected = r.component_A + r.component_B;
  r.group0 = std::move(group0);
  r.group1 = std::move(group1);
  return r;
}

GroupFit fit_group(const Dataset& data, const DecompositionConfig& config) {
  data.validate();
  GroupFit g;
  g.nuisance = estimate_nuisance(data, config.nuisance);
  const Vector& beta = g.nuisance.beta;
  const Vector& gamma = g.nuisance.gamma;
  switch (config.method) {
    case InterceptMethod::Snn:
      g.intercept = snn_intercept(data, beta, gamma, config.kernel, config.bandwidth);
      break;
    case InterceptMethod::H90: g.intercept = h90_intercept(data, beta, gamma, config.tail); break;
    case InterceptMethod::As98: g.intercept = as98_intercept(data, beta, gamma, config.tail); break;
    case InterceptMethod::Ols: {
      const OlsFit fit = ols_selected(data);
      g.intercept.theta = fit.theta;
      g.intercept.std_error = fit.std_errors[0];
      g.intercept.effective_n = fit.n_used;
      g.intercept.bandwidth = 1.0;
      g.intercept.method = "ols";
      break;
    }
    case InterceptMethod::Heckman: {
      const HeckmanFit fit = heckman_two_step(data);
      g.intercept.theta = fit.theta;
      g.intercept.std_error = std::numeric_limits<double>::quiet_NaN();
      g.intercept.effective_n = data.selected_count();
      g.intercept.bandwidth = 1.0;
      g.intercept.method = "heckman";
      break;
    }
  }
  g.mean_y = selected_mean_y(data);
  g.mean_x = selected_mean_x(data);
  return g;
}

namespace {

GroupFit fit_tagged(const Dataset& data, const DecompositionConfig& config, const char* tag) {
  try {
    return fit_group(data, config);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(tag) + ": " + e.what());
  }
}

}  // namespace

DecompositionReport decompose(const Dataset& data0, const Dataset& data1, const DecompositionConfig& config) {
  return combine_groups(fit_tagged(data0, config, "group 0"), fit_tagged(data1, config, "group 1"),
                        config.weighting);
}

namespace {

std::vector<Eigen::Index> resample_rows(Philox& rng, std::size_t n) {
  std::vector<Eigen::Index> rows(n);
  for (auto& r : rows) {
    auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    r = static_cast<Eigen::Index>(std::min(pick, n - 1));
  }
  return rows;
}

}  // namespace

BootstrapResult bootstrap_se(const Dataset& data0, const Dataset& data1, const GroupStatistic& statistic,
                             std::size_t B, std::uint64_t seed, std::size_t workers) {
  if (B < 2) fail(ErrorKind::BootstrapFailed, "need at least 2 bootstrap replications, got " + std::to_string(B));
  std::vector<std::vector<double>> values(B);
  std::vector<char> ok(B, 0);
  detail::parallel_for(B, workers, [&](std::size_t b) {
    Philox rng(derive_seed(seed, "bootstrap", b));
    const auto rows0 = resample_rows(rng, data0.n());
    const auto rows1 = resample_rows(rng, data1.n());
    try {
      values[b] = statistic(data0.take(rows0), data1.take(rows1));
      ok[b] = 1;
    } catch (const Error&) {
    }
  });

  BootstrapResult result;
  for (std::size_t b = 0; b < B; ++b) {
    if (ok[b])
      result.replicates.push_back(std::move(values[b]));
    else
      ++result.reps_failed;
  }
  result.reps_ok = result.replicates.size();
  if (result.reps_ok < 2)
    fail(ErrorKind::BootstrapFailed,
         "only " + std::to_string(result.reps_ok) + " of " + std::to_string(B) + " replications succeeded");
  const std::size_t q = result.replicates.front().size();
  result.se.assign(q, 0.0);
  std::vector<double> column(result.reps_ok);
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t b = 0; b < result.reps_ok; ++b) {
      if (result.replicates[b].size() != q) fail(ErrorKind::InvalidArgument, "statistic changed length");
      column[b] = result.replicates[b][j];
    }
    result.se[j] = sample_sd(column);
  }
  return result;
}

BootstrapResult bootstrap_se(const Dataset& data0, const Dataset& data1, const DecompositionConfig& config,
                             std::size_t B, std::uint64_t seed, std::size_t workers) {
  const GroupStatistic statistic = [&](const Dataset& a, const Dataset& b) {
    return decomposition_quantities(decompose(a, b, config));
  };
  return bootstrap_se(data0, data1, statistic, B, seed, workers);
}

DecompositionReport bootstrap_decomposition(const Dataset& data0, const Dataset& data1,
                                            const DecompositionConfig& config, std::size_t B, std::uint64_t seed,
                                            std::size_t workers) {
  DecompositionReport report = decompose(data0, data1, config);
  const BootstrapResult boot = bootstrap_se(data0, data1, config, B, seed, workers);
  report.bootstrap_se = boot.se;
  report.bootstrap_B = B;
  report.bootstrap_failed = boot.reps_failed;
  return report;
}

void print_decomposition_table(std::ostream& out, const DecompositionReport& r) {
  const bool g0 = r.weighting == Weighting::Group0Weights;
  const auto& names = decomposition_quantity_names();
  auto se_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < names.size() && i < r.bootstrap_se.size(); ++i)
      if (names[i] == name) return r.bootstrap_se[i];
    return std::numeric_limits<double>::quiet_NaN();
  };
  auto row = [&](const char* label, double value, const std::string& name) {
    char buf[160];
    const double se = se_of(name);
    if (std::isnan(se))
      std::snprintf(buf, sizeof buf, "%-34s %10.4f\n", label, value);
    else
      std::snprintf(buf, sizeof buf, "%-34s %10.4f  (%.4f)\n", label, value, se);
    out << buf;
  };
  out << "Decomposition (" << (g0 ? "group-0" : "group-1") << " weights, intercepts by "
      << r.group0.intercept.method << ")\n";
  row("Overall gap", r.gap_overall, "gap_overall");
  row("Endowments (group-0 weights)", r.endowment_group0_weights, "endowment_group0_weights");
  row("Endowments (group-1 weights)", r.endowment_group1_weights, "endowment_group1_weights");
  row("Selection-corrected gap", r.gap_selection_corrected, "gap_selection_corrected");
  row("Coefficients (group-0 weights)", r.coefficients_group0_weights, "coefficients_group0_weights");
  row("Coefficients (group-1 weights)", r.coefficients_group1_weights, "coefficients_group1_weights");
  row("Difference in intercepts", r.intercept_difference, "intercept_difference");
  row("Wage structure (A)", r.component_A, "component_A");
  row("Endowments (B)", r.component_B, "component_B");
  row("Selection (C)", r.component_C, "component_C");
  if (r.bootstrap_B > 0)
    out << "Bootstrap: B = " << r.bootstrap_B << ", failed = " << r.bootstrap_failed << '\n';
}

}  // namespace selint
