#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;

int run_cmd(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("catsim_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string cli() { return std::string("\"") + CATSIM_CLI_PATH + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvaluateReportsPerfectFitOnNoiselessSeparableData) {
  // two well-separated channel states with exactly representable rates: every
  // fold model classifies the held-out rows exactly
  {
    std::ofstream csv(dir_ / "trace.csv");
    csv << "t_s,lat_deg,lon_deg,speed_mps,heading_deg,rsrp_dbm,rsrq_db,snr_db,cqi,cell_id,rate_mbps\n";
    for (int i = 0; i < 40; ++i) {
      const bool good = i % 2 == 0;
      csv << i << ",51,7,10,0," << (good ? -70 : -120) << ",-10," << (good ? 30 : -10) << ","
          << (good ? 15 : 0) << ",c," << (good ? "64" : "0.25") << "\n";
    }
  }
  ASSERT_EQ(run_cmd(cli() + " evaluate --trace " + path("trace.csv") +
                    " --k 4 --seed 1 --out " + path("cv.json") + " > /dev/null 2>&1"),
            0);
  const auto doc = nlohmann::json::parse(slurp(dir_ / "cv.json"));
  ASSERT_FALSE(doc.at("r").is_null());
  EXPECT_NEAR(doc["r"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(doc["mae_mbps"].get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(doc["rmse_mbps"].get<double>(), 0.0, 1e-9);
}

TEST_F(CliTest, CompareReportWithItselfIsIdentityGain) {
  ASSERT_EQ(run_cmd(cli() + " generate --scenario \"" + catsim::testutil::highway_scenario_path() +
                    "\" --seed 9 --out " + path("t.csv") + " > /dev/null 2>&1"),
            0);
  {
    std::ofstream cfg(dir_ / "cfg.json");
    cfg << R"({"tick_s": 1.0, "sensor_rate_Bps": 10000, "seed": 9,
               "policy": {"kind": "periodic", "interval_s": 20.0}})";
  }
  ASSERT_EQ(run_cmd(cli() + " simulate --trace " + path("t.csv") + " --config " +
                    path("cfg.json") + " --out " + path("r.json") + " > /dev/null 2>&1"),
            0);
  ASSERT_EQ(run_cmd(cli() + " compare --baseline " + path("r.json") + " --candidate " +
                    path("r.json") + " --out " + path("gain.json") + " > /dev/null 2>&1"),
            0);
  const auto gain = nlohmann::json::parse(slurp(dir_ / "gain.json"));
  EXPECT_DOUBLE_EQ(gain.at("rate_gain_pct").get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(gain.at("tx_count_ratio").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(gain.at("age_ratio").get<double>(), 1.0);
}

TEST_F(CliTest, HelpDocumentsFlagsAndExitsZero) {
  ASSERT_EQ(run_cmd(cli() + " train --help > " + path("help.txt") + " 2>&1"), 0);
  const std::string help = slurp(dir_ / "help.txt");
  for (const char* flag : {"--trace", "--tx-log", "--payload-bytes", "--geomap", "--min-leaf",
                           "--max-depth", "--min-sdr-gain", "--no-linear-leaves", "--seed",
                           "--out", "--column-map", "--lenient"}) {
    EXPECT_NE(help.find(flag), std::string::npos) << flag;
  }
}

TEST_F(CliTest, ExitCodesDistinguishValidationFromIo) {
  // k = 1 is a validation error
  ASSERT_EQ(run_cmd(cli() + " generate --scenario \"" + catsim::testutil::highway_scenario_path() +
                    "\" --seed 9 --out " + path("t.csv") + " > /dev/null 2>&1"),
            0);
  EXPECT_EQ(run_cmd(cli() + " evaluate --trace " + path("t.csv") + " --k 1 > /dev/null 2>&1"), 1);
  // missing input file is an I/O error
  EXPECT_EQ(run_cmd(cli() + " train --trace " + path("nope.csv") + " --out " + path("m.json") +
                    " > /dev/null 2>&1"),
            2);
  // no subcommand prints usage and fails validation
  EXPECT_EQ(run_cmd(cli() + " > /dev/null 2>&1"), 1);
}
