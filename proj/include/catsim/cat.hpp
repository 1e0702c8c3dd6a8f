#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "catsim/metrics.hpp"
#include "catsim/rng.hpp"
#include "catsim/trace.hpp"

namespace catsim {

/// Shape of the per-tick transmission probability: p = phi^alpha inside the
/// [t_min, t_max) window, 0 below it, 1 at or beyond the deadline.
struct CatParams {
  double alpha = 2.0;     // >= 0
  double t_min_s = 10.0;  // >= 0
  double t_max_s = 120.0; // > t_min_s
};

/// Baseline: transmit the buffer every interval_s regardless of channel state.
struct PeriodicPolicy {
  double interval_s = 30.0;  // > 0
};

struct CatPolicy {
  MetricSpec metric;
  CatParams params;
};

using TransmissionPolicy = std::variant<PeriodicPolicy, CatPolicy>;

void validate_policy(const TransmissionPolicy& policy);

/// Locally buffered sensor data. Elapsed time is carried as a tick count and
/// re-derived as ticks * tick_s each step, so long runs accumulate no float
/// drift. With whole-buffer transmissions and constant-rate accrual the
/// oldest buffered byte is as old as the elapsed time itself.
struct BufferState {
  std::uint64_t bytes = 0;
  std::uint64_t ticks_since_last_tx = 0;
  double elapsed_since_last_tx_s = 0.0;
  double oldest_item_age_s = 0.0;
};

/// One executed buffer transmission.
struct TransmissionRecord {
  double t_start_s = 0.0;
  std::uint64_t payload_bytes = 0;
  double rate_mbps = 0.0;
  double duration_s = 0.0;          // payload_bytes * 8 / (rate_mbps * 1e6)
  double mean_buffer_age_s = 0.0;   // elapsed/2 + duration, uniform accrual
  std::optional<double> phi_at_decision;  // absent for the periodic baseline
};

/// p(transmit this tick) as a function of metric value and elapsed time:
/// 0 before t_min, 1 from t_max on, phi^alpha in between. Monotone
/// non-decreasing in both arguments.
double tx_probability(double phi, double elapsed_s, const CatParams& params);

/// Builds the record for transmitting the whole buffer at `snapshot`.
/// Requires the snapshot's ground-truth rate (simulation-only execution
/// model). The mean buffer age integrates the age of uniformly accrued bytes:
/// elapsed/2, plus the transmission duration itself.
TransmissionRecord execute_transmission(std::uint64_t payload_bytes,
                                        const ContextSnapshot& snapshot,
                                        double elapsed_since_last_tx_s,
                                        std::optional<double> phi = std::nullopt);

struct StepDeps {
  const RegressionTree* predictor = nullptr;
  const GridMap* geomap = nullptr;
  NormalizationBounds bounds;
};

/// Advances the engine by one tick: the buffer grows by
/// round(sensor_rate_Bps * tick_s) bytes (integral so byte conservation is
/// exact), then the policy decides. Periodic triggers once elapsed reaches
/// the interval; CAT evaluates phi, draws u ~ Uniform[0,1) (always, to keep
/// the stream position independent of buffer content) and triggers iff
/// u < tx_probability and the buffer is non-empty. A trigger transmits the
/// whole buffer and resets the elapsed clock.
std::optional<TransmissionRecord> step(const TransmissionPolicy& policy, BufferState& state,
                                       const ContextSnapshot& snapshot, double tick_s,
                                       std::uint64_t sensor_rate_Bps, Rng& rng,
                                       const StepDeps& deps = {});

}  // namespace catsim
