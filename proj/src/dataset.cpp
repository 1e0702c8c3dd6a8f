#include "catsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "catsim/error.hpp"
#include "catsim/text.hpp"

namespace catsim {

TrainingSet dataset_from_trace(const Trace& trace, const DatasetOptions& options) {
  TrainingSet data;
  for (const ContextSnapshot& s : trace.snapshots) {
    if (!s.rate_mbps) continue;
    data.features.push_back(assemble_features(s, options.constant_payload_bytes, options.geomap,
                                              options.geomap_fallback_mbps));
    data.targets.push_back(*s.rate_mbps);
  }
  if (data.size() < 2) {
    throw ValidationError("training data: fewer than 2 snapshots with a ground-truth rate");
  }
  return data;
}

TrainingSet dataset_from_tx_log(const Trace& trace, std::span<const TransmissionRecord> log,
                                const DatasetOptions& options) {
  if (trace.empty()) throw ValidationError("training data: empty trace");
  TrainingSet data;
  for (const TransmissionRecord& record : log) {
    // nearest snapshot in time (earlier sample on ties)
    const auto it = std::lower_bound(
        trace.snapshots.begin(), trace.snapshots.end(), record.t_start_s,
        [](const ContextSnapshot& s, double t) { return s.t_s < t; });
    const ContextSnapshot* snap = &trace.snapshots.back();
    if (it == trace.snapshots.begin()) {
      snap = &*it;
    } else if (it != trace.snapshots.end()) {
      const ContextSnapshot* prev = &*(it - 1);
      snap = (record.t_start_s - prev->t_s <= it->t_s - record.t_start_s) ? prev : &*it;
    }
    if (!(record.rate_mbps > 0.0)) {
      throw ValidationError("training data: transmission at t=" + format_double(record.t_start_s) +
                            " has non-positive rate");
    }
    data.features.push_back(assemble_features(*snap, record.payload_bytes, options.geomap,
                                              options.geomap_fallback_mbps));
    data.targets.push_back(record.rate_mbps);
  }
  if (data.size() < 2) throw ValidationError("training data: fewer than 2 transmissions");
  return data;
}

std::vector<TransmissionRecord> parse_tx_log_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("tx log: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_start_s,payload_bytes,rate_mbps,duration_s,mean_buffer_age_s,phi") {
    throw ValidationError("tx log: unexpected header '" + line + "'");
  }

  std::vector<TransmissionRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw ValidationError("tx log: row " + std::to_string(row) + ": expected 6 fields");
    }
    TransmissionRecord r;
    double phi = 0.0;
    if (!parse_double(fields[0], r.t_start_s) || !parse_u64(fields[1], r.payload_bytes) ||
        !parse_double(fields[2], r.rate_mbps) || !parse_double(fields[3], r.duration_s) ||
        !parse_double(fields[4], r.mean_buffer_age_s)) {
      throw ValidationError("tx log: row " + std::to_string(row) + ": non-numeric field");
    }
    if (!fields[5].empty()) {
      if (!parse_double(fields[5], phi)) {
        throw ValidationError("tx log: row " + std::to_string(row) + ": non-numeric phi");
      }
      r.phi_at_decision = phi;
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace catsim
