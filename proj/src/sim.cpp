#include "catsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "catsim/error.hpp"
#include "catsim/text.hpp"

namespace catsim {

namespace {

bool uniform_at_tick(const Trace& trace, double tick_s) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double expected = static_cast<double>(i) * tick_s;
    if (std::abs(trace.snapshots[i].t_s - expected) > 1e-9) return false;
  }
  return true;
}

}  // namespace

std::string policy_descriptor(const TransmissionPolicy& policy) {
  if (const auto* periodic = std::get_if<PeriodicPolicy>(&policy)) {
    return "periodic{interval_s=" + format_double(periodic->interval_s) + "}";
  }
  const auto& cat = std::get<CatPolicy>(policy);
  return "cat{metric=" + metric_descriptor(cat.metric) +
         ",alpha=" + format_double(cat.params.alpha) +
         ",t_min_s=" + format_double(cat.params.t_min_s) +
         ",t_max_s=" + format_double(cat.params.t_max_s) + "}";
}

SimReport run(const Trace& trace, const SimConfig& config) {
  if (trace.empty()) throw ValidationError("run: empty trace");
  if (!(config.tick_s > 0.0)) throw ValidationError("run: tick_s must be > 0");
  if (config.sensor_rate_Bps == 0) throw ValidationError("run: sensor_rate_Bps must be > 0");
  if (std::llround(static_cast<double>(config.sensor_rate_Bps) * config.tick_s) < 1) {
    throw ValidationError("run: sensor_rate_Bps * tick_s must accrue at least one byte per tick");
  }
  validate_policy(config.policy);
  if (std::holds_alternative<CatPolicy>(config.policy)) {
    const auto& cat = std::get<CatPolicy>(config.policy);
    if (std::holds_alternative<PredictedRateMetric>(cat.metric) && config.predictor == nullptr) {
      throw ValidationError("run: predicted-rate metric requires a model");
    }
  }

  const Trace* replay = &trace;
  Trace resampled;
  if (!uniform_at_tick(trace, config.tick_s)) {
    resampled = resample(trace, config.tick_s);
    replay = &resampled;
  }
  for (std::size_t i = 0; i < replay->size(); ++i) {
    if (!replay->snapshots[i].rate_mbps) {
      throw ValidationError("run: snapshot at t=" + format_double(replay->snapshots[i].t_s) +
                            " has no ground-truth rate_mbps");
    }
  }

  SimReport report;
  report.tick_s = config.tick_s;
  report.seed = config.seed;
  report.policy_descriptor = policy_descriptor(config.policy);
  report.duration_s = static_cast<double>(replay->size()) * config.tick_s;

  Rng rng(config.seed, "sim.cat");
  StepDeps deps{config.predictor, config.geomap, config.bounds};
  BufferState state;
  const std::uint64_t per_tick = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(config.sensor_rate_Bps) * config.tick_s));

  for (const ContextSnapshot& snapshot : replay->snapshots) {
    report.total_bytes_generated += per_tick;
    auto record = step(config.policy, state, snapshot, config.tick_s, config.sensor_rate_Bps,
                       rng, deps);
    if (record) {
      report.total_bytes_transmitted += record->payload_bytes;
      report.transmissions.push_back(std::move(*record));
    }
  }
  report.final_buffer_bytes = state.bytes;
  report.tx_count = report.transmissions.size();

  if (!report.transmissions.empty()) {
    double rate_sum = 0.0, age_sum = 0.0, bits = 0.0;
    for (const TransmissionRecord& r : report.transmissions) {
      rate_sum += r.rate_mbps;
      age_sum += r.mean_buffer_age_s;
      report.max_buffer_age_s = std::max(report.max_buffer_age_s, r.mean_buffer_age_s);
      bits += static_cast<double>(r.payload_bytes) * 8.0;
    }
    const double n = static_cast<double>(report.tx_count);
    report.mean_tx_rate_mbps = rate_sum / n;
    report.mean_buffer_age_s = age_sum / n;
    report.mean_inter_tx_gap_s = report.transmissions.back().t_start_s / n;
    report.time_avg_throughput_mbps = bits / report.duration_s / 1e6;
  }
  return report;
}

GainReport compare(const SimReport& baseline, const SimReport& candidate) {
  if (baseline.transmissions.empty()) throw ValidationError("compare: baseline has no transmissions");
  if (candidate.transmissions.empty()) throw ValidationError("compare: candidate has no transmissions");
  GainReport gain;
  gain.rate_gain_pct = 100.0 * (candidate.mean_tx_rate_mbps / baseline.mean_tx_rate_mbps - 1.0);
  gain.tx_count_ratio =
      static_cast<double>(candidate.tx_count) / static_cast<double>(baseline.tx_count);
  gain.age_ratio = candidate.mean_buffer_age_s / baseline.mean_buffer_age_s;
  return gain;
}

std::string report_to_json(const SimReport& report) {
  nlohmann::json doc;
  doc["policy"] = report.policy_descriptor;
  doc["seed"] = report.seed;
  doc["tick_s"] = report.tick_s;
  doc["duration_s"] = report.duration_s;
  doc["tx_count"] = report.tx_count;
  doc["mean_tx_rate_mbps"] = report.mean_tx_rate_mbps;
  doc["mean_buffer_age_s"] = report.mean_buffer_age_s;
  doc["max_buffer_age_s"] = report.max_buffer_age_s;
  doc["mean_inter_tx_gap_s"] = report.mean_inter_tx_gap_s;
  doc["time_avg_throughput_mbps"] = report.time_avg_throughput_mbps;
  doc["total_bytes_generated"] = report.total_bytes_generated;
  doc["total_bytes_transmitted"] = report.total_bytes_transmitted;
  doc["final_buffer_bytes"] = report.final_buffer_bytes;

  nlohmann::json txs = nlohmann::json::array();
  for (const TransmissionRecord& r : report.transmissions) {
    nlohmann::json tx;
    tx["t_start_s"] = r.t_start_s;
    tx["payload_bytes"] = r.payload_bytes;
    tx["rate_mbps"] = r.rate_mbps;
    tx["duration_s"] = r.duration_s;
    tx["mean_buffer_age_s"] = r.mean_buffer_age_s;
    if (r.phi_at_decision) {
      tx["phi"] = *r.phi_at_decision;
    } else {
      tx["phi"] = nullptr;
    }
    txs.push_back(std::move(tx));
  }
  doc["transmissions"] = std::move(txs);
  return doc.dump(2) + "\n";
}

SimReport report_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("report file: invalid JSON: ") + e.what());
  }
  try {
    SimReport report;
    report.policy_descriptor = doc.at("policy").get<std::string>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.tick_s = doc.at("tick_s").get<double>();
    report.duration_s = doc.at("duration_s").get<double>();
    report.tx_count = doc.at("tx_count").get<std::uint64_t>();
    report.mean_tx_rate_mbps = doc.at("mean_tx_rate_mbps").get<double>();
    report.mean_buffer_age_s = doc.at("mean_buffer_age_s").get<double>();
    report.max_buffer_age_s = doc.at("max_buffer_age_s").get<double>();
    report.mean_inter_tx_gap_s = doc.at("mean_inter_tx_gap_s").get<double>();
    report.time_avg_throughput_mbps = doc.at("time_avg_throughput_mbps").get<double>();
    report.total_bytes_generated = doc.at("total_bytes_generated").get<std::uint64_t>();
    report.total_bytes_transmitted = doc.at("total_bytes_transmitted").get<std::uint64_t>();
    report.final_buffer_bytes = doc.at("final_buffer_bytes").get<std::uint64_t>();
    for (const auto& tx : doc.at("transmissions")) {
      TransmissionRecord r;
      r.t_start_s = tx.at("t_start_s").get<double>();
      r.payload_bytes = tx.at("payload_bytes").get<std::uint64_t>();
      r.rate_mbps = tx.at("rate_mbps").get<double>();
      r.duration_s = tx.at("duration_s").get<double>();
      r.mean_buffer_age_s = tx.at("mean_buffer_age_s").get<double>();
      if (!tx.at("phi").is_null()) r.phi_at_decision = tx["phi"].get<double>();
      report.transmissions.push_back(std::move(r));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report file: ") + e.what());
  }
}

std::string gain_to_json(const GainReport& gain) {
  nlohmann::json doc;
  doc["rate_gain_pct"] = gain.rate_gain_pct;
  doc["tx_count_ratio"] = gain.tx_count_ratio;
  doc["age_ratio"] = gain.age_ratio;
  return doc.dump(2) + "\n";
}

void write_tx_log_csv(const SimReport& report, std::ostream& out) {
  out << "t_start_s,payload_bytes,rate_mbps,duration_s,mean_buffer_age_s,phi\n";
  for (const TransmissionRecord& r : report.transmissions) {
    out << format_double(r.t_start_s) << ',' << r.payload_bytes << ','
        << format_double(r.rate_mbps) << ',' << format_double(r.duration_s) << ','
        << format_double(r.mean_buffer_age_s) << ',';
    if (r.phi_at_decision) out << format_double(*r.phi_at_decision);
    out << '\n';
  }
}

}  // namespace catsim
