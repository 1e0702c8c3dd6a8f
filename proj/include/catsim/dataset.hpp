#pragma once

#include <cstdint>
#include <span>

#include "catsim/cat.hpp"
#include "catsim/predictor.hpp"
#include "catsim/trace.hpp"

namespace catsim {

struct DatasetOptions {
  std::uint64_t constant_payload_bytes = 1000000;  // payload column when no tx log is given
  const GridMap* geomap = nullptr;                 // adds the map feature when set
  double geomap_fallback_mbps = 0.0;
};

/// One row per snapshot that carries a ground-truth rate; the payload column
/// is the configured constant.
TrainingSet dataset_from_trace(const Trace& trace, const DatasetOptions& options = {});

/// One row per transmission record: context from the trace snapshot nearest
/// to t_start, payload from the record, target from the record's achieved
/// rate.
TrainingSet dataset_from_tx_log(const Trace& trace, std::span<const TransmissionRecord> log,
                                const DatasetOptions& options = {});

/// Reads the transmissions-log CSV written by the simulator.
std::vector<TransmissionRecord> parse_tx_log_csv(const std::string& csv);

}  // namespace catsim
