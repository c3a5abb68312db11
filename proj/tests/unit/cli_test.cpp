#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetnet_cli/commands.hpp"

namespace hetnet::cli {
namespace {

namespace fs = std::filesystem;

const char* kFig2 = R"({
  "network": {
    "macro": {"density": 1e-4, "pathloss": 4, "antennas": 8},
    "pico": {"density": 5e-4, "pathloss": 4, "antennas": 4},
    "power_ratio_db": 10, "user_density": 0.01, "bias_db": 5, "in_dof": 4
  },
  "analysis": {"tau": [1e5, 1e6], "load_models": ["mla"]},
  "simulation": {"trials": 200, "seed": 3}
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hetnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("cfg.json", kFig2);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }
  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }
  std::vector<std::string> base(const std::string& cmd, const std::string& out = "out") {
    return {cmd, "--config", (dir_ / "cfg.json").string(), "--out-dir", (dir_ / out).string()};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, AnalyticWritesCsvAndSidecar) {
  ASSERT_EQ(run_cli(base("analytic")), kExitOk) << err_.str();
  const std::string csv = read(dir_ / "out" / "analytic.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "tau,model,in_dof,total,macro,pico_unoffloaded,offloaded_in,offloaded_non_in,"
            "weight_macro,weight_pico_unoffloaded,weight_offloaded_in,weight_offloaded_non_in,"
            "truncated_mass");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const Json meta = Json::parse(read(dir_ / "out" / "analytic.json"));
  EXPECT_EQ(meta["command"], "analytic");
  EXPECT_TRUE(meta["version"].is_string());
  EXPECT_EQ(meta["config"]["network"]["bias_db"], 5);
  EXPECT_NEAR(meta["resolved"]["network"]["bias"].get<double>(), db_to_linear(5.0), 1e-15);
  EXPECT_TRUE(meta.contains("runtime_seconds"));
}

TEST_F(CliTest, OutputsAreReproducible) {
  ASSERT_EQ(run_cli(base("simulate", "a")), kExitOk) << err_.str();
  ASSERT_EQ(run_cli(base("simulate", "b")), kExitOk) << err_.str();
  EXPECT_EQ(read(dir_ / "a" / "simulate.csv"), read(dir_ / "b" / "simulate.csv"));
  Json a = Json::parse(read(dir_ / "a" / "simulate.json"));
  Json b = Json::parse(read(dir_ / "b" / "simulate.json"));
  for (Json* j : {&a, &b}) {
    j->erase("runtime_seconds");
    (*j)["config"].erase("output");
    (*j)["resolved"].erase("output");
  }
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, FlagsAndOverridesReachTheConfig) {
  auto args = base("simulate");
  for (std::string extra : {"--trials", "50", "--seed", "9", "--fidelity", "full", "--set",
                            "network.bias_db=8"})
    args.push_back(extra);
  ASSERT_EQ(run_cli(args), kExitOk) << err_.str();
  const Json meta = Json::parse(read(dir_ / "out" / "simulate.json"));
  EXPECT_EQ(meta["resolved"]["simulation"]["trials"], 50);
  EXPECT_EQ(meta["seed"], 9);
  EXPECT_EQ(meta["resolved"]["simulation"]["fidelity"], "full");
  EXPECT_NEAR(meta["resolved"]["network"]["bias"].get<double>(), db_to_linear(8.0), 1e-12);
}

TEST_F(CliTest, ConfigErrorsExitWithOneAndNameTheField) {
  auto args = base("analytic");
  args.insert(args.end(), {"--set", "network.in_dof=8"});
  EXPECT_EQ(run_cli(args), kExitConfig);
  EXPECT_NE(err_.str().find("in_dof"), std::string::npos);

  args = base("analytic");
  args.insert(args.end(), {"--set", "network.macro.colour=1"});
  EXPECT_EQ(run_cli(args), kExitConfig);
  EXPECT_NE(err_.str().find("network.macro.colour"), std::string::npos);

  args = base("analytic");
  args.insert(args.end(), {"--set", "network.bias=2"});
  EXPECT_EQ(run_cli(args), kExitOk) << err_.str();

  write("cfg.json", R"({"network": {"bias": 2, "bias_db": 3}})");
  EXPECT_EQ(run_cli(base("analytic")), kExitConfig);
  EXPECT_NE(err_.str().find("bias_db"), std::string::npos);

  write("cfg.json", "{ not json");
  EXPECT_EQ(run_cli(base("analytic")), kExitConfig);
  EXPECT_EQ(run_cli({"analytic"}), kExitConfig);
  EXPECT_EQ(run_cli({"frobnicate", "--config", "x"}), kExitConfig);
}

TEST_F(CliTest, MissingGridIsAConfigError) {
  EXPECT_EQ(run_cli(base("sweep-bias")), kExitConfig);
  EXPECT_NE(err_.str().find("sweep.bias_db"), std::string::npos);
}

TEST_F(CliTest, NumericFailureExitsWithTwo) {
  auto args = base("analytic");
  args.insert(args.end(), {"--set", "analysis.numerics.max_intervals=1", "--set",
                           "analysis.numerics.relative_tol=1e-15", "--set",
                           "analysis.numerics.coverage_abs_tol=1e-15"});
  EXPECT_EQ(run_cli(args), kExitNumeric) << err_.str();
}

TEST_F(CliTest, SmallWindowExitsWithThree) {
  auto args = base("simulate");
  args.insert(args.end(), {"--set", "simulation.window_radius=150"});
  EXPECT_EQ(run_cli(args), kExitWindow) << err_.str();
}

TEST_F(CliTest, ValidateFailsOnImpossibleTolerance) {
  auto args = base("validate");
  args.insert(args.end(), {"--set", "validate.tolerance=1e-9", "--set", "analysis.tau=[1e6]"});
  EXPECT_EQ(run_cli(args), kExitValidation);
  EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "validate.json"));
}

TEST_F(CliTest, OptimizeAndSweepCommandsRun) {
  auto args = base("optimize-u");
  ASSERT_EQ(run_cli(args), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "out" / "optimize-u_trace.csv"));
  args = base("optimize-abs");
  args.insert(args.end(), {"--set", "optimize.abs_iterations=4"});
  ASSERT_EQ(run_cli(args), kExitOk) << err_.str();
  args = base("sweep-bias");
  args.insert(args.end(), {"--set", "sweep.bias_db=[3,9]", "--trials", "100"});
  ASSERT_EQ(run_cli(args), kExitOk) << err_.str();
  const std::string csv = read(dir_ / "out" / "sweep-bias.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Config, GridExpansion) {
  const auto g = expand_grid(Json::parse(R"({"start": 1e2, "stop": 1e4, "count": 3, "spacing": "log"})"), "t");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], 1e2);
  EXPECT_EQ(g[1], 1e3);
  EXPECT_EQ(g[2], 1e4);
  EXPECT_EQ(expand_grid(Json::parse("[1, 2]"), "t").size(), 2u);
  EXPECT_EQ(expand_grid(Json::parse(R"({"start": 0, "stop": 24, "count": 9})"), "t")[1], 3.0);
  EXPECT_THROW(expand_grid(Json::parse("[]"), "t"), ConfigError);
  EXPECT_THROW(expand_grid(Json::parse(R"({"start": 1})"), "t"), ConfigError);
}

TEST(Config, OverridesParseJsonOrFallBackToText) {
  Json doc = Json::object();
  apply_override(doc, "a.b=3");
  apply_override(doc, "a.c=[1,2]");
  apply_override(doc, "a.d=fast");
  EXPECT_EQ(doc["a"]["b"], 3);
  EXPECT_EQ(doc["a"]["c"].size(), 2u);
  EXPECT_EQ(doc["a"]["d"], "fast");
  EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(doc, "a..b=1"), ConfigError);
}

TEST(Output, NumbersRoundTrip) {
  for (double x : {0.1, 1e-300, 123456789.125, -2.5e17}) EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

}  // namespace
}  // namespace hetnet::cli
