#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "catsim/cat.hpp"
#include "catsim/trace.hpp"

namespace catsim {

struct SimConfig {
  double tick_s = 1.0;                  // > 0
  std::uint64_t sensor_rate_Bps = 10000;  // > 0
  std::uint64_t seed = 0;
  TransmissionPolicy policy = PeriodicPolicy{};
  // Non-owning dependencies for the predicted-rate metric.
  const RegressionTree* predictor = nullptr;
  const GridMap* geomap = nullptr;
  NormalizationBounds bounds;
};

/// Per-run KPIs. The headline "mean data rate" is the arithmetic mean of the
/// per-transmission achieved rates; the time-averaged throughput is reported
/// alongside. Buffer-age statistics are over the per-transmission mean
/// buffer ages.
struct SimReport {
  std::vector<TransmissionRecord> transmissions;
  std::uint64_t tx_count = 0;
  double mean_tx_rate_mbps = 0.0;
  double mean_buffer_age_s = 0.0;
  double max_buffer_age_s = 0.0;
  double mean_inter_tx_gap_s = 0.0;  // time of last transmission / tx_count
  double time_avg_throughput_mbps = 0.0;
  std::uint64_t total_bytes_generated = 0;
  std::uint64_t total_bytes_transmitted = 0;
  std::uint64_t final_buffer_bytes = 0;
  double duration_s = 0.0;
  double tick_s = 0.0;
  std::uint64_t seed = 0;
  std::string policy_descriptor;
};

/// Replays the trace under the configured policy, one engine step per tick.
/// The trace is resampled to config.tick_s internally unless it is already
/// uniform at that tick. Every snapshot must carry a ground-truth rate.
/// Deterministic given (trace, config).
SimReport run(const Trace& trace, const SimConfig& config);

struct GainReport {
  double rate_gain_pct = 0.0;   // 100 * (candidate/baseline - 1), sign kept
  double tx_count_ratio = 0.0;  // candidate / baseline
  double age_ratio = 0.0;       // candidate / baseline, mean buffer age
};

/// Candidate vs. baseline. Both reports must contain transmissions.
GainReport compare(const SimReport& baseline, const SimReport& candidate);

std::string policy_descriptor(const TransmissionPolicy& policy);

/// Report persistence (JSON, machine-stable) and the per-transmission log
/// CSV: t_start_s,payload_bytes,rate_mbps,duration_s,mean_buffer_age_s,phi
/// (phi empty for periodic transmissions).
std::string report_to_json(const SimReport& report);
SimReport report_from_json(const std::string& json_text);
std::string gain_to_json(const GainReport& gain);
void write_tx_log_csv(const SimReport& report, std::ostream& out);

}  // namespace catsim
