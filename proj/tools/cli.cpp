#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "selint/csv_io.hpp"
#include "selint/decompose.hpp"
#include "selint/dgp.hpp"
#include "selint/error.hpp"
#include "selint/montecarlo.hpp"
#include "selint/numerics.hpp"
#include "selint/report.hpp"

namespace selint::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Decimal number or a ratio "a/b".
double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const double a = std::stod(text.substr(0, slash));
      const double b = std::stod(text.substr(slash + 1), &used);
      if (used == text.size() - slash - 1 && b != 0.0) return a / b;
    }
  } catch (const std::exception&) {
  }
  fail(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text)) out.push_back(parse_number(item));
  if (out.empty()) fail(ErrorKind::InvalidArgument, "empty number list");
  return out;
}

BandwidthRule parse_bandwidth(const std::string& text) {
  if (text == "plugin") return BandwidthRule::plug_in(1.0);
  if (text.rfind("plugin:", 0) == 0) return BandwidthRule::plug_in(parse_number(text.substr(7)));
  if (text.rfind("fixed:", 0) == 0) return BandwidthRule::fixed(parse_number(text.substr(6)));
  fail(ErrorKind::InvalidArgument, "bad bandwidth '" + text + "' (valid: fixed:h, plugin, plugin:scale)");
}

GammaMethod parse_gamma_method(const std::string& text) {
  if (text == "probit") return GammaMethod::Probit;
  if (text == "klein-spady") return GammaMethod::KleinSpady;
  fail(ErrorKind::InvalidArgument, "unknown gamma method '" + text + "' (valid: probit, klein-spady)");
}

// Either the file named by --out or the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) fail(ErrorKind::Io, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Options {
  std::string dgp = "dgp1";
  std::size_t n = 100;
  std::size_t reps = 1000;
  std::string rho;
  std::string alpha;
  std::string estimator = "snn";
  std::string bandwidth = "plugin";
  int kernel_order = 2;
  double tail_quantile = 0.95;
  double tau_quantile = 0.5;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::string out;
  std::string format;
  std::string nuisance = "pinned";
  // rate-check
  std::string ns = "200,400,800,1600";
  double c = 0.5;
  // data-driven commands
  std::string data;
  std::string schema = "default";
  std::string outcome, selection, x_cols, z_cols, group;
  std::string beta, gamma;
  std::string gamma_method = "klein-spady";
  std::size_t B = 200;
  std::string weighting = "group0";
  // ident-check
  std::size_t points = 9;
};

TailRule tail_rule(const Options& o) {
  TailRule rule{o.tail_quantile, o.tau_quantile};
  rule.validate();
  return rule;
}

EstimatorConfig estimator_config(const Options& o, EstimatorKind kind, const BandwidthRule& bandwidth) {
  EstimatorConfig c;
  c.kind = kind;
  c.kernel = KernelSpec::of_order(o.kernel_order);
  c.bandwidth = bandwidth;
  c.tail = tail_rule(o);
  if (o.nuisance == "pinned") {
    c.nuisance = NuisanceMode::Pinned;
  } else if (o.nuisance == "estimated") {
    c.nuisance = NuisanceMode::Estimated;
    c.nuisance_config.gamma_method = parse_gamma_method(o.gamma_method);
  } else {
    fail(ErrorKind::InvalidArgument, "unknown nuisance mode '" + o.nuisance + "' (valid: pinned, estimated)");
  }
  return c;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  DgpSpec spec;
  spec.family = parse_dgp_family(o.dgp);
  spec.n = o.n;
  spec.rho = o.rho.empty() ? 0.0 : parse_number(o.rho);
  spec.alpha = o.alpha.empty() ? 2.0 : parse_number(o.alpha);
  spec.seed = o.seed;
  const LatentDraw draw = simulate(spec);
  Sink sink(o.out, out);
  write_csv(*sink, draw.dataset, default_schema(spec.k, spec.l));
  return kExitOk;
}

int cmd_mc_table(const Options& o, std::ostream& out) {
  TablePlan plan;
  plan.family = parse_dgp_family(o.dgp);
  if (!o.rho.empty()) plan.rhos = parse_numbers(o.rho);
  if (!o.alpha.empty()) plan.alphas = parse_numbers(o.alpha);
  for (const auto& name : split(o.estimator)) {
    const EstimatorKind kind = parse_estimator_kind(name);
    if (kind == EstimatorKind::Snn) {
      for (const auto& bw : split(o.bandwidth)) {
        const EstimatorConfig c = estimator_config(o, kind, parse_bandwidth(bw));
        plan.panels.push_back({c.label(), c});
      }
    } else {
      const EstimatorConfig c = estimator_config(o, kind, BandwidthRule::plug_in());
      plan.panels.push_back({c.label(), c});
    }
  }
  if (plan.panels.empty()) fail(ErrorKind::InvalidArgument, "no estimators given");
  const MonteCarloReport report = run_table(plan, o.n, o.reps, o.seed, {o.workers});
  Sink sink(o.out, out);
  write_report(*sink, report, parse_report_format(o.format.empty() ? "csv" : o.format));
  return kExitOk;
}

int cmd_rate_check(const Options& o, std::ostream& out) {
  if (o.estimator != "snn") fail(ErrorKind::InvalidArgument, "rate-check supports --estimator snn only");
  DgpSpec spec;
  spec.family = parse_dgp_family(o.dgp);
  spec.rho = o.rho.empty() ? 0.0 : parse_number(o.rho);
  spec.alpha = o.alpha.empty() ? 2.0 : parse_number(o.alpha);
  std::vector<std::size_t> ns;
  for (double v : parse_numbers(o.ns)) {
    if (!(v >= 2.0) || v != std::floor(v)) fail(ErrorKind::InvalidArgument, "sample sizes must be integers >= 2");
    ns.push_back(static_cast<std::size_t>(v));
  }
  const KernelSpec kernel = KernelSpec::of_order(o.kernel_order);
  const RateCheckResult result =
      rate_check(ns, spec, snn_rate_estimator(spec, kernel), kernel.order(), o.c, o.reps, o.seed, {o.workers});
  const double target = -static_cast<double>(kernel.order()) / (2.0 * kernel.order() + 1.0);
  Sink sink(o.out, out);
  if (o.format == "json") {
    nlohmann::json doc;
    doc["slope"] = result.slope;
    doc["target_slope"] = target;
    for (const auto& p : result.points)
      doc["points"].push_back({{"n", p.n}, {"bandwidth", p.bandwidth}, {"rmse", p.rmse}, {"failed", p.stats.reps_failed}});
    *sink << doc.dump(2) << '\n';
  } else {
    char line[160];
    *sink << "n,bandwidth,rmse,failed\n";
    for (const auto& p : result.points) {
      std::snprintf(line, sizeof line, "%zu,%.6f,%.6g,%zu\n", p.n, p.bandwidth, p.rmse, p.stats.reps_failed);
      *sink << line;
    }
    std::snprintf(line, sizeof line, "slope %.4f (rate-optimal target %.4f)\n", result.slope, target);
    *sink << line;
  }
  return kExitOk;
}

// Default schema columns come from the header: y, d, then x* and z* in file order.
CsvSchema schema_for(const Options& o) {
  CsvSchema schema;
  if (o.schema == "mfls2") {
    schema = mfls2_schema();
  } else if (o.schema == "default") {
    schema.outcome_column = "y";
    schema.selection_column = "d";
    if (o.x_cols.empty() || o.z_cols.empty()) {
      std::ifstream in(o.data);
      if (!in) fail(ErrorKind::Io, "cannot open " + o.data);
      std::string header;
      std::getline(in, header);
      for (const auto& name : split(header)) {
        auto digits = [&] { return name.size() > 1 && std::all_of(name.begin() + 1, name.end(), ::isdigit); };
        if (name[0] == 'x' && digits()) schema.x_columns.push_back(name);
        if (name[0] == 'z' && digits()) schema.z_columns.push_back(name);
      }
    }
  } else {
    fail(ErrorKind::InvalidArgument, "unknown schema '" + o.schema + "' (valid: default, mfls2)");
  }
  if (!o.outcome.empty()) schema.outcome_column = o.outcome;
  if (!o.selection.empty()) schema.selection_column = o.selection;
  if (!o.x_cols.empty()) schema.x_columns = split(o.x_cols);
  if (!o.z_cols.empty()) schema.z_columns = split(o.z_cols);
  if (!o.group.empty()) schema.group_column = o.group;
  schema.validate();
  return schema;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int cmd_estimate(const Options& o, std::ostream& out) {
  if (o.data.empty()) fail(ErrorKind::InvalidArgument, "--data is required");
  Options plain = o;
  plain.group.clear();
  const Dataset data = std::get<Dataset>(load_csv(o.data, schema_for(plain)));
  data.validate();
  const EstimatorKind kind = parse_estimator_kind(o.estimator);

  InterceptEstimate est;
  std::string beta_method = "given", gamma_method = "given";
  if (kind == EstimatorKind::Ols) {
    const OlsFit fit = ols_selected(data);
    est = {fit.theta, fit.std_errors[0], 1.0, fit.n_used, "ols"};
    beta_method = gamma_method = "none";
  } else if (kind == EstimatorKind::Heckman) {
    const HeckmanFit fit = heckman_two_step(data);
    est = {fit.theta, std::nan(""), 1.0, data.selected_count(), "heckman"};
    beta_method = gamma_method = "none";
  } else {
    Vector beta, gamma;
    if (!o.beta.empty() && !o.gamma.empty()) {
      beta = to_vector(parse_numbers(o.beta));
      gamma = to_vector(parse_numbers(o.gamma));
    } else if (o.beta.empty() != o.gamma.empty()) {
      fail(ErrorKind::InvalidArgument, "--beta and --gamma must be given together");
    } else {
      NuisanceConfig nc;
      nc.gamma_method = parse_gamma_method(o.gamma_method);
      NuisanceEstimates nuisance = estimate_nuisance(data, nc);
      beta = nuisance.beta;
      gamma = nuisance.gamma;
      beta_method = nuisance.beta_method;
      gamma_method = nuisance.gamma_method;
    }
    if (kind == EstimatorKind::Snn)
      est = snn_intercept(data, beta, gamma, KernelSpec::of_order(o.kernel_order), parse_bandwidth(o.bandwidth));
    else if (kind == EstimatorKind::H90)
      est = h90_intercept(data, beta, gamma, tail_rule(o));
    else
      est = as98_intercept(data, beta, gamma, tail_rule(o));
  }

  Sink sink(o.out, out);
  if (o.format == "json") {
    nlohmann::json doc{{"method", est.method},       {"theta", est.theta},
                       {"std_error", est.std_error}, {"bandwidth", est.bandwidth},
                       {"effective_n", est.effective_n}, {"n", data.n()},
                       {"beta_method", beta_method}, {"gamma_method", gamma_method}};
    *sink << doc.dump(2) << '\n';
  } else {
    char line[200];
    std::snprintf(line, sizeof line, "method %s\ntheta %.12g\nstd_error %.6g\nbandwidth %.6g\neffective_n %zu\nn %zu\n",
                  est.method.c_str(), est.theta, est.std_error, est.bandwidth, est.effective_n, data.n());
    *sink << line;
  }
  return kExitOk;
}

int cmd_decompose(const Options& o, std::ostream& out) {
  if (o.data.empty()) fail(ErrorKind::InvalidArgument, "--data is required");
  if (o.group.empty()) fail(ErrorKind::InvalidArgument, "--group is required");
  const auto grouped = std::get<GroupedDatasets>(load_csv(o.data, schema_for(o)));
  DecompositionConfig config;
  config.method = parse_intercept_method(o.estimator);
  config.kernel = KernelSpec::of_order(o.kernel_order);
  config.bandwidth = parse_bandwidth(o.bandwidth);
  config.tail = tail_rule(o);
  config.nuisance.gamma_method = parse_gamma_method(o.gamma_method);
  if (o.weighting == "group0")
    config.weighting = Weighting::Group0Weights;
  else if (o.weighting == "group1")
    config.weighting = Weighting::Group1Weights;
  else
    fail(ErrorKind::InvalidArgument, "unknown weighting '" + o.weighting + "' (valid: group0, group1)");

  const DecompositionReport report =
      o.B == 0 ? decompose(grouped.group0, grouped.group1, config)
               : bootstrap_decomposition(grouped.group0, grouped.group1, config, o.B, o.seed, o.workers);
  Sink sink(o.out, out);
  if (o.format == "json") {
    nlohmann::json doc;
    const auto names = decomposition_quantity_names();
    const auto values = decomposition_quantities(report);
    for (std::size_t i = 0; i < names.size(); ++i) {
      doc["estimates"][names[i]] = values[i];
      if (!report.bootstrap_se.empty()) doc["bootstrap_se"][names[i]] = report.bootstrap_se[i];
    }
    doc["bootstrap_B"] = report.bootstrap_B;
    doc["bootstrap_failed"] = report.bootstrap_failed;
    doc["weighting"] = o.weighting;
    doc["method"] = o.estimator;
    *sink << doc.dump(2) << '\n';
  } else {
    print_decomposition_table(*sink, report);
  }
  return kExitOk;
}

int cmd_kernel_check(const Options& o, std::ostream& out) {
  std::vector<int> orders;
  if (o.kernel_order == 0)
    orders = {2, 4};
  else
    orders = {o.kernel_order};
  Sink sink(o.out, out);
  bool ok = true;
  char line[160];
  for (int p : orders) {
    const KernelSpec k = KernelSpec::of_order(p);
    const QuadratureGrid grid;
    const QuadratureGrid fine = grid.refined();
    *sink << to_string(k.family()) << " (order " << p << ", " << grid.size() << " nodes)\n";
    for (int j = 0; j <= 2 * p; ++j) {
      const double m = kernel_moment(k, j, grid);
      const double drift = std::abs(m - kernel_moment(k, j, fine));
      bool pass = drift < 1e-8;
      if (j == 0) pass = pass && std::abs(m - 1.0) < 1e-8;
      if (j > 0 && j < p) pass = pass && std::abs(m) < 1e-8;
      if (j == p) pass = pass && std::isfinite(m) && std::abs(m) > 1e-8;
      ok = ok && pass;
      std::snprintf(line, sizeof line, "  moment %d  % .12f  drift %.1e  %s\n", j, m, drift, pass ? "ok" : "FAIL");
      *sink << line;
    }
    const double l2 = kernel_l2(k, grid);
    const bool pass = std::abs(l2 - kernel_l2(k, fine)) < 1e-8 && l2 > 0.0;
    ok = ok && pass;
    std::snprintf(line, sizeof line, "  int K^2   % .12f  %s\n", l2, pass ? "ok" : "FAIL");
    *sink << line;
  }
  return ok ? kExitOk : kExitNumerical;
}

int cmd_ident_check(const Options& o, std::ostream& out) {
  const DgpFamily family = parse_dgp_family(o.dgp);
  const std::vector<double> alphas = o.alpha.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0} : parse_numbers(o.alpha);
  std::vector<double> qs;
  for (std::size_t i = 1; i <= o.points; ++i) qs.push_back(static_cast<double>(i) / static_cast<double>(o.points + 1));
  for (int e = 2; e <= 8; ++e) qs.push_back(1.0 - std::pow(10.0, -e));
  Sink sink(o.out, out);
  *sink << "q";
  for (double a : alphas) *sink << ",alpha=" << a;
  *sink << '\n';
  char cell[64];
  for (double q : qs) {
    std::snprintf(cell, sizeof cell, "%.10g", q);
    *sink << cell;
    for (double a : alphas) {
      std::snprintf(cell, sizeof cell, ",%.8g", identification_ratio(family, a, q));
      *sink << cell;
    }
    *sink << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample-selection intercept estimation, Monte Carlo tables and decompositions", "selint"};
  app.require_subcommand(1);
  Options o;

  auto common_dgp = [&](CLI::App* sub) {
    sub->add_option("--dgp", o.dgp, "dgp1 or dgp2")->capture_default_str();
    sub->add_option("--rho", o.rho, "rho value or comma list");
    sub->add_option("--alpha", o.alpha, "alpha value or comma list");
    sub->add_option("--seed", o.seed, "base seed")->capture_default_str();
  };
  auto common_estimator = [&](CLI::App* sub) {
    sub->add_option("--estimator", o.estimator, "snn, ols, heckman, h90, as98 (mc-table: comma list)")
        ->capture_default_str();
    sub->add_option("--bandwidth", o.bandwidth, "fixed:h | plugin[:scale] (mc-table: comma list)")
        ->capture_default_str();
    sub->add_option("--kernel-order", o.kernel_order, "2 or 4")->capture_default_str();
    sub->add_option("--tail-quantile", o.tail_quantile, "sample quantile of the index used as b_n")
        ->capture_default_str();
    sub->add_option("--tau-quantile", o.tau_quantile, "sample quantile of the index used as tau")
        ->capture_default_str();
  };
  auto common_output = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv, json or markdown");
    sub->add_option("--workers", o.workers, "worker threads")->capture_default_str();
  };
  auto common_data = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "input CSV")->required();
    sub->add_option("--schema", o.schema, "default (y, d, x*, z*) or mfls2")->capture_default_str();
    sub->add_option("--outcome", o.outcome, "outcome column");
    sub->add_option("--selection", o.selection, "selection column");
    sub->add_option("--x-cols", o.x_cols, "outcome covariates, comma list");
    sub->add_option("--z-cols", o.z_cols, "selection covariates, comma list");
    sub->add_option("--gamma-method", o.gamma_method, "probit or klein-spady")->capture_default_str();
  };

  auto* sim = app.add_subcommand("simulate", "draw one DGP sample to CSV");
  common_dgp(sim);
  sim->add_option("--n", o.n, "sample size")->capture_default_str();
  sim->add_option("--out", o.out, "output file (default stdout)");

  auto* mc = app.add_subcommand("mc-table", "Monte Carlo table over rho x alpha");
  common_dgp(mc);
  common_estimator(mc);
  common_output(mc);
  mc->add_option("--n", o.n, "sample size")->capture_default_str();
  mc->add_option("--reps", o.reps, "replications per cell")->capture_default_str();
  mc->add_option("--nuisance", o.nuisance, "pinned or estimated")->capture_default_str();
  mc->add_option("--gamma-method", o.gamma_method, "probit or klein-spady")->capture_default_str();

  auto* rate = app.add_subcommand("rate-check", "log-log RMSE slope under the undersmoothing schedule");
  common_dgp(rate);
  common_estimator(rate);
  common_output(rate);
  rate->remove_option(rate->get_option("--bandwidth"));
  rate->add_option("--ns", o.ns, "increasing sample sizes, comma list")->capture_default_str();
  rate->add_option("--reps", o.reps, "replications per sample size")->capture_default_str();
  rate->add_option("--c", o.c, "bandwidth constant c in c n^(-1/(2p+1))")->capture_default_str();

  auto* est = app.add_subcommand("estimate", "intercept of one dataset");
  common_estimator(est);
  common_data(est);
  est->add_option("--beta", o.beta, "outcome slopes, comma list (skips nuisance estimation)");
  est->add_option("--gamma", o.gamma, "selection coefficients, comma list");
  est->add_option("--out", o.out, "output file (default stdout)");
  est->add_option("--format", o.format, "text or json");

  auto* dec = app.add_subcommand("decompose", "two-group decomposition with bootstrap standard errors");
  common_estimator(dec);
  common_data(dec);
  common_output(dec);
  dec->add_option("--group", o.group, "0/1 group column")->required();
  dec->add_option("--B", o.B, "bootstrap replications (0 disables)")->capture_default_str();
  dec->add_option("--seed", o.seed, "bootstrap seed")->capture_default_str();
  dec->add_option("--weighting", o.weighting, "group0 or group1")->capture_default_str();

  auto* kc = app.add_subcommand("kernel-check", "kernel moment diagnostics");
  o.kernel_order = 2;
  kc->add_option("--kernel-order", o.kernel_order, "2 or 4 (0 checks both)");
  kc->add_option("--out", o.out, "output file (default stdout)");

  auto* ic = app.add_subcommand("ident-check", "identification ratio profile in q");
  ic->add_option("--dgp", o.dgp, "dgp1 or dgp2")->capture_default_str();
  ic->add_option("--alpha", o.alpha, "comma list of alpha values");
  ic->add_option("--points", o.points, "interior grid points")->capture_default_str();
  ic->add_option("--out", o.out, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (mc->parsed()) return cmd_mc_table(o, out);
    if (rate->parsed()) return cmd_rate_check(o, out);
    if (est->parsed()) return cmd_estimate(o, out);
    if (dec->parsed()) return cmd_decompose(o, out);
    if (kc->parsed()) return cmd_kernel_check(o, out);
    if (ic->parsed()) return cmd_ident_check(o, out);
  } catch (const Error& e) {
    err << "selint: " << e.what() << '\n';
    return e.is_usage() ? kExitUsage : kExitNumerical;
  } catch (const std::bad_variant_access&) {
    err << "selint: expected " << (o.group.empty() ? "ungrouped" : "grouped") << " data\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "selint: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace selint::cli
