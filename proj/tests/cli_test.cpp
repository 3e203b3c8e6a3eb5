// End-to-end checks of the command-line tool: spawned as a subprocess, so
// exit codes and byte-level output are exercised exactly as a user sees
// them. The binary path comes from the build via QSDC_CLI_PATH.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

#ifndef QSDC_CLI_PATH
#error "QSDC_CLI_PATH must point at the qsdc binary"
#endif

std::string cli_path() { return QSDC_CLI_PATH; }

std::string temp_path(const std::string& name) {
  return std::string(::testing::TempDir()) + "/" + name;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// first line that is not a # metadata comment
std::string header_line(const std::string& content) {
  std::stringstream ss(content);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return "";
}

TEST(CliTest, FixedSeedRunsAreByteIdentical) {
  const auto out1 = temp_path("run1.csv");
  const auto out2 = temp_path("run2.csv");
  const std::string args =
      "simulate --protocol fpp --n-pairs 200 --control-prob 0.2 --seed 321 "
      "--message-len 100 --out ";
  ASSERT_EQ(run_cli(args + out1), 0);
  ASSERT_EQ(run_cli(args + out2), 0);
  const auto c1 = slurp(out1);
  ASSERT_FALSE(c1.empty());
  EXPECT_EQ(c1, slurp(out2));
}

TEST(CliTest, CurvesHeaderContract) {
  const auto out = temp_path("fig2.csv");
  ASSERT_EQ(run_cli("curves --figure fig2 --points 5 --out " + out), 0);
  const auto content = slurp(out);
  EXPECT_EQ(header_line(content), "d,info_dpp,info_fpp");
  EXPECT_NE(content.find("\n0.5,2,"), std::string::npos);  // peak row
}

TEST(CliTest, Fig3StartsAtCertainSuccess) {
  const auto out = temp_path("fig3.csv");
  ASSERT_EQ(run_cli("curves --figure fig3 --points 5 --out " + out), 0);
  const auto content = slurp(out);
  EXPECT_EQ(header_line(content), "info,s_d0.2,s_d0.4,s_d0.5,s_d0.6,s_d0.8");
  EXPECT_NE(content.find("\n0,1,1,1,1,1\n"), std::string::npos);
}

TEST(CliTest, JsonOutputParses) {
  const auto out = temp_path("run.json");
  ASSERT_EQ(run_cli("simulate --protocol dpp --n-pairs 50 --seed 5 "
                    "--message-len 20 --format json --out " +
                    out),
            0);
  const auto obj = nlohmann::json::parse(slurp(out));
  ASSERT_TRUE(obj.contains("meta"));
  ASSERT_TRUE(obj.contains("report"));
  EXPECT_EQ(obj["meta"]["seed"].get<std::string>(), "5");
  EXPECT_EQ(obj["meta"]["version"].get<std::string>(), "0.1.0");
  EXPECT_EQ(obj["report"]["aborted"].get<std::string>(), "false");
  EXPECT_EQ(obj["report"]["bit_error_count"].get<std::string>(), "0");
}

TEST(CliTest, AbortedRunStillExitsZero) {
  const auto out = temp_path("aborted.json");
  ASSERT_EQ(run_cli("simulate --protocol fpp --n-pairs 100 --control-prob 0.3 "
                    "--attack 0.5,0.5 --seed 8 --format json --out " +
                    out),
            0);
  const auto obj = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(obj["report"]["aborted"].get<std::string>(), "true");
}

TEST(CliTest, EstimatorMode) {
  const auto out = temp_path("estimate.json");
  ASSERT_EQ(run_cli("simulate --protocol fpp --attack 0.5,0.5 --trials 5000 "
                    "--seed 12 --format json --out " +
                    out),
            0);
  const auto obj = nlohmann::json::parse(slurp(out));
  const double rate =
      std::stod(obj["report"]["empirical_detection_rate"].get<std::string>());
  EXPECT_NEAR(rate, 0.875, 3.0 * std::sqrt(0.875 * 0.125 / 5000.0));
}

TEST(CliTest, SweepOrdersRowsByGridIndex) {
  const auto out = temp_path("sweep.csv");
  ASSERT_EQ(run_cli("sweep --protocol fpp --grid 0,1 --trials 200 --seed 4 "
                    "--out " +
                    out),
            0);
  const auto content = slurp(out);
  EXPECT_EQ(header_line(content), "a,t,empirical,stderr,analytic");
  // rows follow grid order (0,0), (0,1), (1,0), (1,1)
  const auto p00 = content.find("\n0,0,1,");        // full flip: rate 1
  const auto p11 = content.find("\n1,1,0,0,0\n");   // identity: rate 0
  EXPECT_NE(p00, std::string::npos);
  EXPECT_NE(p11, std::string::npos);
  EXPECT_LT(p00, p11);
}

TEST(CliTest, EnvSeedIsDefaultAndFlagWins) {
  const auto out_env = temp_path("seed_env.csv");
  const auto out_flag = temp_path("seed_flag.csv");
  const std::string tail =
      " --protocol fpp --n-pairs 60 --control-prob 0.2 --message-len 40 --out ";
  ASSERT_EQ(std::system(("QSDC_SEED=9001 " + cli_path() + " simulate" + tail +
                         out_env)
                            .c_str()),
            0);
  ASSERT_EQ(run_cli("simulate --seed 9001" + tail + out_flag), 0);
  EXPECT_EQ(slurp(out_env), slurp(out_flag));

  const auto out_override = temp_path("seed_override.csv");
  ASSERT_EQ(std::system(("QSDC_SEED=1 " + cli_path() + " simulate --seed 9001" +
                         tail + out_override)
                            .c_str()),
            0);
  EXPECT_EQ(slurp(out_override), slurp(out_flag));  // flag beats env
}

TEST(CliTest, BadArgumentsExitTwo) {
  EXPECT_EQ(run_cli("simulate --protocol nope 2>/dev/null"), 2);
  EXPECT_EQ(run_cli("curves --figure fig9 2>/dev/null"), 2);
  EXPECT_EQ(run_cli("simulate --attack 0.5 2>/dev/null"), 2);
  EXPECT_EQ(run_cli("2>/dev/null"), 2);  // missing subcommand
}

TEST(CliTest, UnwritableOutputExitsThree) {
  EXPECT_EQ(run_cli("curves --figure fig2 --points 3 --out "
                    "/nonexistent-dir/x.csv 2>/dev/null"),
            3);
}

}  // namespace
