#include "catsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "catsim/config.hpp"
#include "catsim/error.hpp"
#include "catsim/metrics.hpp"
#include "catsim/synth.hpp"
#include "test_util.hpp"

using namespace catsim;

namespace {

Trace constant_rate_trace(std::size_t seconds, double rate_mbps) {
  Trace trace;
  for (std::size_t k = 0; k < seconds; ++k) {
    ContextSnapshot s;
    s.t_s = static_cast<double>(k);
    s.channel = {-90.0, -10.0, 10.0, 7};
    s.mobility = {{51.0, 7.0}, 10.0, 0.0};
    s.cell_id = "c";
    s.rate_mbps = rate_mbps;
    trace.snapshots.push_back(std::move(s));
  }
  trace.tick_s = 1.0;
  return trace;
}

// inter-transmission gaps as the engine counts them: the first cycle starts
// one tick before the first snapshot's timestamp
std::vector<double> gaps_of(const SimReport& report) {
  std::vector<double> gaps;
  double prev = -report.tick_s;
  for (const TransmissionRecord& r : report.transmissions) {
    gaps.push_back(r.t_start_s - prev);
    prev = r.t_start_s;
  }
  return gaps;
}

SimConfig cat_single_snr_config(double alpha, double t_min, double t_max, std::uint64_t seed) {
  CatPolicy cat;
  cat.metric = SingleMetric{Indicator::kSnr};
  cat.params = {alpha, t_min, t_max};
  SimConfig config;
  config.policy = cat;
  config.seed = seed;
  return config;
}

}  // namespace

TEST(Run, HandSimulatedPeriodicOracle) {
  // 60 s at a constant 8 Mbit/s, Periodic{10}, 10^4 B/s, 1 s ticks:
  // transmissions at t = 9, 19, ..., 59 carrying 10^5 bytes each
  const Trace trace = constant_rate_trace(60, 8.0);
  SimConfig config;
  config.policy = PeriodicPolicy{10.0};
  config.sensor_rate_Bps = 10000;
  const SimReport report = run(trace, config);

  ASSERT_EQ(report.tx_count, 6u);
  for (const TransmissionRecord& r : report.transmissions) {
    EXPECT_EQ(r.payload_bytes, 100000u);
    EXPECT_DOUBLE_EQ(r.rate_mbps, 8.0);
    EXPECT_DOUBLE_EQ(r.duration_s, 0.1);  // 8e5 bits at 8e6 bit/s
    EXPECT_DOUBLE_EQ(r.mean_buffer_age_s, 5.1);
  }
  EXPECT_DOUBLE_EQ(report.mean_tx_rate_mbps, 8.0);
  EXPECT_EQ(report.total_bytes_generated, 600000u);
  EXPECT_EQ(report.total_bytes_transmitted, 600000u);
  EXPECT_EQ(report.final_buffer_bytes, 0u);
  EXPECT_DOUBLE_EQ(report.transmissions.front().t_start_s, 9.0);
  EXPECT_DOUBLE_EQ(report.transmissions.back().t_start_s, 59.0);
}

TEST(Run, ConservationIsExact) {
  Rng rng(51, "test.sim.conserve");
  for (int iter = 0; iter < 10; ++iter) {
    const Scenario scenario = testutil::make_random_scenario(rng);
    const Trace trace = generate_trace(scenario);
    SimConfig config = cat_single_snr_config(2.0, 5.0, 40.0, rng.next_u64());
    config.sensor_rate_Bps = 1 + rng.uniform_below(20000);
    const SimReport report = run(trace, config);
    EXPECT_EQ(report.total_bytes_transmitted + report.final_buffer_bytes,
              report.total_bytes_generated);
  }
}

TEST(Run, DeadlineAndMinGapHold) {
  Rng rng(52, "test.sim.deadline");
  for (int iter = 0; iter < 15; ++iter) {
    const Scenario scenario = testutil::make_random_scenario(rng);
    const Trace trace = generate_trace(scenario);
    const double t_min = 4.0 + rng.uniform() * 10.0;
    const double t_max = t_min + 10.0 + rng.uniform() * 40.0;
    SimConfig config = cat_single_snr_config(2.0, t_min, t_max, rng.next_u64());
    const SimReport report = run(trace, config);
    for (double gap : gaps_of(report)) {
      EXPECT_GE(gap, t_min - 1e-9);
      EXPECT_LE(gap, t_max + config.tick_s + 1e-9);
    }
  }
}

TEST(Run, DeterministicReports) {
  const Scenario scenario = load_scenario_file(testutil::highway_scenario_path());
  const Trace trace = generate_trace(scenario);
  SimConfig config = cat_single_snr_config(2.0, 10.0, 120.0, 7);
  EXPECT_EQ(report_to_json(run(trace, config)), report_to_json(run(trace, config)));
}

TEST(Run, ResamplesNonUniformTracesInternally) {
  Trace trace;
  for (double t : {0.0, 2.0, 4.0}) {
    ContextSnapshot s;
    s.t_s = t;
    s.channel = {-90.0, -10.0, 10.0, 7};
    s.mobility = {{51.0, 7.0}, 10.0, 0.0};
    s.rate_mbps = 8.0;
    trace.snapshots.push_back(std::move(s));
  }
  SimConfig config;
  config.policy = PeriodicPolicy{2.0};
  config.tick_s = 1.0;
  const SimReport report = run(trace, config);
  EXPECT_DOUBLE_EQ(report.duration_s, 5.0);  // snapshots at t = 0..4
  EXPECT_EQ(report.tx_count, 2u);
}

TEST(Run, MissingRateOrEmptyTraceIsAnError) {
  SimConfig config;
  config.policy = PeriodicPolicy{2.0};
  EXPECT_THROW(run(Trace{}, config), ValidationError);

  Trace no_rate = constant_rate_trace(5, 8.0);
  no_rate.snapshots[3].rate_mbps.reset();
  EXPECT_THROW(run(no_rate, config), ValidationError);
}

TEST(Run, SubByteAccrualIsRejected) {
  const Trace trace = constant_rate_trace(5, 8.0);
  SimConfig config;
  config.policy = PeriodicPolicy{2.0};
  config.tick_s = 0.01;
  config.sensor_rate_Bps = 10;
  EXPECT_THROW(run(trace, config), ValidationError);
}

TEST(Compare, HeadlineGainArithmetic) {
  SimReport baseline, candidate;
  baseline.transmissions.resize(4);
  baseline.tx_count = 4;
  baseline.mean_tx_rate_mbps = 10.0;
  baseline.mean_buffer_age_s = 20.0;
  candidate.transmissions.resize(5);
  candidate.tx_count = 5;
  candidate.mean_tx_rate_mbps = 26.4;
  candidate.mean_buffer_age_s = 30.0;

  const GainReport gain = compare(baseline, candidate);
  EXPECT_NEAR(gain.rate_gain_pct, 164.0, 1e-9);
  EXPECT_DOUBLE_EQ(gain.tx_count_ratio, 1.25);
  EXPECT_DOUBLE_EQ(gain.age_ratio, 1.5);
}

TEST(Compare, IdentityAndNegativeGains) {
  const Trace trace = constant_rate_trace(60, 8.0);
  SimConfig config;
  config.policy = PeriodicPolicy{10.0};
  const SimReport report = run(trace, config);

  const GainReport identity = compare(report, report);
  EXPECT_DOUBLE_EQ(identity.rate_gain_pct, 0.0);
  EXPECT_DOUBLE_EQ(identity.tx_count_ratio, 1.0);
  EXPECT_DOUBLE_EQ(identity.age_ratio, 1.0);

  SimReport slower = report;
  slower.mean_tx_rate_mbps = 4.0;
  const GainReport negative = compare(report, slower);
  EXPECT_DOUBLE_EQ(negative.rate_gain_pct, -50.0);
}

TEST(Compare, EmptySidesAreErrors) {
  const Trace trace = constant_rate_trace(60, 8.0);
  SimConfig config;
  config.policy = PeriodicPolicy{10.0};
  const SimReport report = run(trace, config);
  SimReport empty;
  EXPECT_THROW(compare(empty, report), ValidationError);
  EXPECT_THROW(compare(report, empty), ValidationError);
}

TEST(Run, HotspotSeekingOnBundledHighwayScenario) {
  // sigma = 0 variant of the bundled highway scenario with a Single{snr}
  // metric: every transmission is either at a phi at/above the trace's
  // time-median normalized snr, or forced by the t_max deadline
  Scenario scenario = load_scenario_file(testutil::highway_scenario_path());
  scenario.shadowing_sigma_db = 0.0;
  const Trace trace = generate_trace(scenario);

  std::vector<double> phis;
  const NormalizationBounds bounds;
  for (const ContextSnapshot& s : trace.snapshots) {
    phis.push_back(normalize_indicator(s.channel.snr_db, bounds.snr));
  }
  std::vector<double> sorted = phis;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];

  SimConfig config = cat_single_snr_config(4.0, 10.0, 120.0, 42);
  const SimReport report = run(trace, config);
  ASSERT_GT(report.tx_count, 2u);

  const auto gaps = gaps_of(report);
  for (std::size_t i = 0; i < report.transmissions.size(); ++i) {
    const TransmissionRecord& r = report.transmissions[i];
    ASSERT_TRUE(r.phi_at_decision.has_value());
    const bool deadline = gaps[i] >= 120.0;
    EXPECT_TRUE(*r.phi_at_decision >= median || deadline)
        << "tx " << i << " phi " << *r.phi_at_decision << " median " << median;
  }
}

TEST(RunSpecJson, ParsesPolicyAndBoundsOverrides) {
  const std::string text = R"({
    "tick_s": 0.5, "sensor_rate_Bps": 2000, "seed": 11,
    "policy": {"kind": "cat", "alpha": 3.0, "t_min_s": 5.0, "t_max_s": 60.0,
               "metric": {"kind": "single", "indicator": "snr"}},
    "bounds": {"snr": [0, 20]}
  })";
  const RunSpec spec = run_spec_from_json_text(text);
  EXPECT_DOUBLE_EQ(spec.sim.tick_s, 0.5);
  EXPECT_EQ(spec.sim.sensor_rate_Bps, 2000u);
  EXPECT_EQ(spec.sim.seed, 11u);
  const auto& cat = std::get<CatPolicy>(spec.sim.policy);
  EXPECT_DOUBLE_EQ(cat.params.alpha, 3.0);
  EXPECT_DOUBLE_EQ(spec.sim.bounds.snr.lo, 0.0);
  EXPECT_DOUBLE_EQ(spec.sim.bounds.snr.hi, 20.0);
  EXPECT_DOUBLE_EQ(spec.sim.bounds.rsrp.lo, kRsrpMinDbm);  // untouched default

  // overridden bounds change the metric
  ContextSnapshot s;
  s.channel = {-90.0, -10.0, 10.0, 7};
  s.mobility = {{51.0, 7.0}, 10.0, 0.0};
  EXPECT_DOUBLE_EQ(evaluate_metric(cat.metric, s, 0, nullptr, nullptr, spec.sim.bounds).phi, 0.5);

  EXPECT_THROW(run_spec_from_json_text(R"({"policy": {"kind": "warp"}})"), ValidationError);
  EXPECT_THROW(run_spec_from_json_text(R"({
    "policy": {"kind": "periodic", "interval_s": 10},
    "bounds": {"snr": [20, 0]}})"),
               ValidationError);
}

TEST(ReportJson, RoundTripAndTxLogShape) {
  const Trace trace = constant_rate_trace(60, 8.0);
  SimConfig config;
  config.policy = PeriodicPolicy{10.0};
  config.seed = 3;
  const SimReport report = run(trace, config);

  const SimReport back = report_from_json(report_to_json(report));
  EXPECT_EQ(report_to_json(back), report_to_json(report));

  std::ostringstream csv;
  write_tx_log_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string header, first;
  ASSERT_TRUE(std::getline(lines, header));
  EXPECT_EQ(header, "t_start_s,payload_bytes,rate_mbps,duration_s,mean_buffer_age_s,phi");
  ASSERT_TRUE(std::getline(lines, first));
  EXPECT_EQ(first, "9,100000,8,0.1,5.1,");  // periodic: phi cell stays empty
}
