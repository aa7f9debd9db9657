#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = selint::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const char* dir = std::getenv("SELINT_TEST_TMP");
  return std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string()) / name;
}

}  // namespace

TEST(Cli, HelpIsSuccess) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, selint::cli::kExitOk);
  EXPECT_NE(r.out.find("mc-table"), std::string::npos);
}

TEST(Cli, MissingSubcommandIsUsage) { EXPECT_EQ(invoke({}).code, selint::cli::kExitUsage); }

TEST(Cli, UnknownFlagIsUsage) {
  EXPECT_EQ(invoke({"mc-table", "--bogus", "1"}).code, selint::cli::kExitUsage);
}

TEST(Cli, UnknownEstimatorListsValidSet) {
  const auto r = invoke({"mc-table", "--estimator", "lasso", "--reps", "2"});
  EXPECT_EQ(r.code, selint::cli::kExitUsage);
  for (const char* name : {"snn", "ols", "heckman", "h90", "as98"})
    EXPECT_NE(r.err.find(name), std::string::npos) << r.err;
}

TEST(Cli, BadBandwidthIsUsage) {
  EXPECT_EQ(invoke({"mc-table", "--bandwidth", "fixed:abc", "--reps", "2"}).code, selint::cli::kExitUsage);
  EXPECT_EQ(invoke({"mc-table", "--bandwidth", "fixed:2", "--reps", "2"}).code, selint::cli::kExitUsage);
}

TEST(Cli, MissingDataFileIsUsage) {
  EXPECT_EQ(invoke({"estimate", "--data", "/nonexistent/file.csv"}).code, selint::cli::kExitUsage);
}

TEST(Cli, IdentCheckProfilesTail) {
  EXPECT_EQ(invoke({"ident-check", "--dgp", "dgp2", "--alpha", "0.5", "--points", "3"}).code,
            selint::cli::kExitOk);
}

TEST(Cli, SimulateThenEstimateRoundTrip) {
  const auto path = scratch("cli_sim.csv");
  ASSERT_EQ(invoke({"simulate", "--n", "300", "--seed", "5", "--out", path.string()}).code, 0);
  const auto r = invoke({"estimate", "--data", path.string(), "--gamma-method", "probit", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"theta\""), std::string::npos);
}

TEST(Cli, ConstantResidualOutcomeReturnsTheConstant) {
  const auto path = scratch("cli_const.csv");
  {
    std::ofstream f(path);
    f << "y,d,x1,z1,z2\n";
    for (int i = 0; i < 60; ++i) {
      const double x = 0.1 * (i % 7) - 0.3;
      const double z2 = std::sin(0.37 * i);
      const int d = 1;
      f << (d ? 2.5 + 2.0 * x : 0.0) << ',' << d << ',' << x << ',' << 0.05 * i - 1.0 << ',' << z2 << '\n';
    }
  }
  const auto r = invoke({"estimate", "--data", path.string(), "--beta", "2", "--gamma", "1,0.5",
                         "--bandwidth", "fixed:0.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string key;
  double theta = 0.0;
  while (lines >> key) {
    if (key == "theta") {
      lines >> theta;
      break;
    }
  }
  EXPECT_NEAR(theta, 2.5, 1e-10);
}

TEST(Cli, McTableWritesRequestedFormat) {
  const auto r = invoke({"mc-table", "--n", "60", "--reps", "4", "--rho", "0", "--alpha", "2",
                         "--estimator", "snn,ols", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.front(), '{');
  const auto md = invoke({"mc-table", "--n", "60", "--reps", "4", "--rho", "0,0.5", "--alpha", "2",
                          "--format", "markdown"});
  ASSERT_EQ(md.code, 0) << md.err;
  EXPECT_NE(md.out.find('|'), std::string::npos);
}

TEST(Cli, KernelCheckPasses) {
  const auto r = invoke({"kernel-check", "--kernel-order", "0"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, RateCheckRejectsBaselines) {
  EXPECT_EQ(invoke({"rate-check", "--estimator", "ols"}).code, selint::cli::kExitUsage);
}

TEST(Cli, DecomposeNeedsGroup) {
  const auto path = scratch("cli_sim2.csv");
  ASSERT_EQ(invoke({"simulate", "--n", "50", "--out", path.string()}).code, 0);
  EXPECT_EQ(invoke({"decompose", "--data", path.string()}).code, selint::cli::kExitUsage);
}
