#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catsim/geo.hpp"

namespace catsim {

/// The four LTE downlink quality indicators carried by every snapshot.
enum class Indicator { kRsrp, kRsrq, kSnr, kCqi };

inline constexpr Indicator kAllIndicators[] = {Indicator::kRsrp, Indicator::kRsrq,
                                               Indicator::kSnr, Indicator::kCqi};

const char* indicator_name(Indicator ind);
std::optional<Indicator> indicator_from_name(std::string_view name);

// Validity ranges (standard LTE reporting ranges). Strict parsing rejects
// values outside these; lenient parsing clamps them.
inline constexpr double kRsrpMinDbm = -140.0, kRsrpMaxDbm = -44.0;
inline constexpr double kRsrqMinDb = -19.5, kRsrqMaxDb = -3.0;
inline constexpr double kSnrMinDb = -10.0, kSnrMaxDb = 30.0;
inline constexpr int kCqiMin = 0, kCqiMax = 15;

struct ChannelIndicators {
  double rsrp_dbm = 0.0;
  double rsrq_db = 0.0;
  double snr_db = 0.0;
  int cqi = 0;

  friend bool operator==(const ChannelIndicators&, const ChannelIndicators&) = default;
};

struct MobilitySample {
  GeoPosition position;
  double speed_mps = 0.0;
  double heading_deg = 0.0;  // compass bearing, [0, 360)

  friend bool operator==(const MobilitySample&, const MobilitySample&) = default;
};

/// One timestamped sample of channel + mobility context. `t_s` is the offset
/// from trace start; `rate_mbps`, when present, is the ground-truth achievable
/// data rate at that instant (> 0).
struct ContextSnapshot {
  double t_s = 0.0;
  ChannelIndicators channel;
  MobilitySample mobility;
  std::string cell_id;
  std::optional<double> rate_mbps;

  friend bool operator==(const ContextSnapshot&, const ContextSnapshot&) = default;
};

/// Ordered, strictly-increasing-in-time sequence of snapshots. `tick_s` is
/// the nominal sampling period when known (set by resample() and the
/// scenario generator); it is derived metadata and does not take part in
/// value equality.
struct Trace {
  std::vector<ContextSnapshot> snapshots;
  std::optional<double> tick_s;

  bool empty() const { return snapshots.empty(); }
  std::size_t size() const { return snapshots.size(); }
  double duration_s() const { return snapshots.empty() ? 0.0 : snapshots.back().t_s; }

  friend bool operator==(const Trace& a, const Trace& b) { return a.snapshots == b.snapshots; }
};

/// Maps canonical column names to the header names used by a source CSV.
/// Defaults are the canonical schema itself. cell_id and rate are optional:
/// they are read when the mapped header exists.
struct ColumnMap {
  std::string t = "t_s";
  std::string lat = "lat_deg";
  std::string lon = "lon_deg";
  std::string speed = "speed_mps";
  std::string heading = "heading_deg";
  std::string rsrp = "rsrp_dbm";
  std::string rsrq = "rsrq_db";
  std::string snr = "snr_db";
  std::string cqi = "cqi";
  std::string cell_id = "cell_id";
  std::string rate = "rate_mbps";
};

/// Parses CSV into a Trace. Timestamps are normalized to start at 0.
/// Channel-indicator and speed violations are errors in strict mode and are
/// clamped to their bounds in lenient mode; headings are wrapped into
/// [0, 360) in both modes. Position out of range, non-numeric fields,
/// non-increasing timestamps and an empty result are always errors.
Trace parse_trace(std::istream& csv, const ColumnMap& columns = {}, bool lenient = false);
Trace parse_trace(const std::string& csv, const ColumnMap& columns = {}, bool lenient = false);

/// Resamples onto the uniform grid k*tick_s, k = 0..floor(t_last/tick_s).
/// Numeric fields interpolate linearly between bracketing samples, heading on
/// the circle (shortest arc), cqi is rounded after interpolation, and
/// categorical fields (cell_id) come from the nearest-in-time sample
/// (earlier sample on ties). rate is present only when both brackets have it.
Trace resample(const Trace& trace, double tick_s);

/// Canonical trace CSV. Header:
///   t_s,lat_deg,lon_deg,speed_mps,heading_deg,rsrp_dbm,rsrq_db,snr_db,cqi,cell_id,rate_mbps
/// The rate_mbps column is omitted when no snapshot carries a rate; absent
/// per-row rates are written as empty cells. parse_trace(write_trace(t))
/// reproduces t field-for-field.
void write_trace(const Trace& trace, std::ostream& out);
std::string write_trace(const Trace& trace);

/// Wraps any angle into [0, 360).
double normalize_heading_deg(double heading_deg);

}  // namespace catsim
