#include "catsim/cat.hpp"

#include <cmath>

#include "catsim/error.hpp"

namespace catsim {

void validate_policy(const TransmissionPolicy& policy) {
  if (const auto* periodic = std::get_if<PeriodicPolicy>(&policy)) {
    if (!(periodic->interval_s > 0.0)) {
      throw ValidationError("periodic policy: interval_s must be > 0");
    }
    return;
  }
  const auto& cat = std::get<CatPolicy>(policy);
  if (!(cat.params.alpha >= 0.0) || !std::isfinite(cat.params.alpha)) {
    throw ValidationError("cat policy: alpha must be finite and >= 0");
  }
  if (cat.params.t_min_s < 0.0) throw ValidationError("cat policy: t_min_s must be >= 0");
  if (!(cat.params.t_max_s > cat.params.t_min_s)) {
    throw ValidationError("cat policy: t_max_s must be > t_min_s");
  }
  validate_metric_spec(cat.metric);
}

double tx_probability(double phi, double elapsed_s, const CatParams& params) {
  if (elapsed_s < params.t_min_s) return 0.0;
  if (elapsed_s >= params.t_max_s) return 1.0;
  return std::pow(phi, params.alpha);
}

TransmissionRecord execute_transmission(std::uint64_t payload_bytes,
                                        const ContextSnapshot& snapshot,
                                        double elapsed_since_last_tx_s,
                                        std::optional<double> phi) {
  if (!snapshot.rate_mbps) {
    throw ValidationError("execute_transmission: snapshot has no ground-truth rate");
  }
  TransmissionRecord record;
  record.t_start_s = snapshot.t_s;
  record.payload_bytes = payload_bytes;
  record.rate_mbps = *snapshot.rate_mbps;
  record.duration_s =
      static_cast<double>(payload_bytes) * 8.0 / (record.rate_mbps * 1e6);
  record.mean_buffer_age_s = elapsed_since_last_tx_s / 2.0 + record.duration_s;
  record.phi_at_decision = phi;
  return record;
}

std::optional<TransmissionRecord> step(const TransmissionPolicy& policy, BufferState& state,
                                       const ContextSnapshot& snapshot, double tick_s,
                                       std::uint64_t sensor_rate_Bps, Rng& rng,
                                       const StepDeps& deps) {
  state.bytes += static_cast<std::uint64_t>(
      std::llround(static_cast<double>(sensor_rate_Bps) * tick_s));
  ++state.ticks_since_last_tx;
  state.elapsed_since_last_tx_s = static_cast<double>(state.ticks_since_last_tx) * tick_s;
  state.oldest_item_age_s = state.bytes > 0 ? state.elapsed_since_last_tx_s : 0.0;

  bool fire = false;
  std::optional<double> phi;
  if (const auto* periodic = std::get_if<PeriodicPolicy>(&policy)) {
    fire = state.elapsed_since_last_tx_s >= periodic->interval_s;
  } else {
    const auto& cat = std::get<CatPolicy>(policy);
    phi = evaluate_metric(cat.metric, snapshot, state.bytes, deps.predictor, deps.geomap,
                          deps.bounds)
              .phi;
    const double p = tx_probability(*phi, state.elapsed_since_last_tx_s, cat.params);
    fire = rng.uniform() < p;
  }

  if (!fire || state.bytes == 0) return std::nullopt;

  TransmissionRecord record =
      execute_transmission(state.bytes, snapshot, state.elapsed_since_last_tx_s, phi);
  state.bytes = 0;
  state.ticks_since_last_tx = 0;
  state.elapsed_since_last_tx_s = 0.0;
  state.oldest_item_age_s = 0.0;
  return record;
}

}  // namespace catsim
