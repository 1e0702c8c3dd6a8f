#include "catsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "catsim/error.hpp"
#include "catsim/text.hpp"

namespace catsim {

namespace {

constexpr const char* kIndicatorNames[] = {"rsrp", "rsrq", "snr", "cqi"};

struct FieldSpec {
  const char* name;      // canonical name, used in error messages
  double lo;
  double hi;
  bool clamp_when_lenient;
};

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Validates one numeric field against its bounds. Returns the (possibly
// clamped) value; throws naming the data row index and field otherwise.
double check_field(double value, const FieldSpec& spec, std::size_t row, bool lenient) {
  if (value >= spec.lo && value <= spec.hi) return value;
  if (lenient && spec.clamp_when_lenient) return clamp(value, spec.lo, spec.hi);
  throw ValidationError("row " + std::to_string(row) + ": " + spec.name + " = " +
                        format_double(value) + " outside [" + format_double(spec.lo) + ", " +
                        format_double(spec.hi) + "]");
}

std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_numeric(std::string_view text, const char* field, std::size_t row) {
  double value = 0.0;
  if (!parse_double(text, value) || !std::isfinite(value)) {
    throw ValidationError("row " + std::to_string(row) + ": non-numeric " + std::string(field) +
                          " '" + std::string(text) + "'");
  }
  return value;
}

// Shortest-arc interpolation between two headings, result in [0, 360).
double lerp_heading(double h0, double h1, double w) {
  double diff = std::fmod(h1 - h0, 360.0);
  if (diff > 180.0) diff -= 360.0;
  if (diff <= -180.0) diff += 360.0;
  return normalize_heading_deg(h0 + w * diff);
}

double lerp(double a, double b, double w) { return a + w * (b - a); }

void require_csv_safe(const std::string& value, const char* field) {
  if (value.find_first_of(",\"\n\r") != std::string::npos) {
    throw ValidationError(std::string(field) + " contains characters not representable in the "
                          "canonical CSV: '" + value + "'");
  }
}

}  // namespace

const char* indicator_name(Indicator ind) { return kIndicatorNames[static_cast<int>(ind)]; }

std::optional<Indicator> indicator_from_name(std::string_view name) {
  for (Indicator ind : kAllIndicators) {
    if (name == indicator_name(ind)) return ind;
  }
  return std::nullopt;
}

double normalize_heading_deg(double heading_deg) {
  double h = std::fmod(heading_deg, 360.0);
  if (h < 0.0) h += 360.0;
  if (h == 360.0) h = 0.0;  // fmod can round up to the modulus
  return h;
}

Trace parse_trace(std::istream& csv, const ColumnMap& columns, bool lenient) {
  std::string line;
  if (!std::getline(csv, line)) throw ValidationError("empty input: missing header row");
  const std::string header_line = trim_cr(line);
  const auto header = split_csv_line(header_line);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(header[i]), i);

  auto required = [&](const std::string& mapped) {
    auto it = index.find(mapped);
    if (it == index.end()) throw ValidationError("missing mapped column '" + mapped + "'");
    return it->second;
  };
  auto optional_col = [&](const std::string& mapped) -> std::optional<std::size_t> {
    auto it = index.find(mapped);
    if (it == index.end()) return std::nullopt;
    return it->second;
  };

  const std::size_t col_t = required(columns.t);
  const std::size_t col_lat = required(columns.lat);
  const std::size_t col_lon = required(columns.lon);
  const std::size_t col_speed = required(columns.speed);
  const std::size_t col_heading = required(columns.heading);
  const std::size_t col_rsrp = required(columns.rsrp);
  const std::size_t col_rsrq = required(columns.rsrq);
  const std::size_t col_snr = required(columns.snr);
  const std::size_t col_cqi = required(columns.cqi);
  const auto col_cell = optional_col(columns.cell_id);
  const auto col_rate = optional_col(columns.rate);

  const FieldSpec rsrp_spec{"rsrp_dbm", kRsrpMinDbm, kRsrpMaxDbm, true};
  const FieldSpec rsrq_spec{"rsrq_db", kRsrqMinDb, kRsrqMaxDb, true};
  const FieldSpec snr_spec{"snr_db", kSnrMinDb, kSnrMaxDb, true};
  const FieldSpec cqi_spec{"cqi", kCqiMin, kCqiMax, true};
  const FieldSpec lat_spec{"lat_deg", -90.0, 90.0, false};
  const FieldSpec lon_spec{"lon_deg", -180.0, 180.0, false};
  const FieldSpec speed_spec{"speed_mps", 0.0, std::numeric_limits<double>::infinity(), true};

  Trace trace;
  std::optional<double> t0;
  double prev_raw_t = 0.0;
  std::size_t row = 0;  // 1-based data row index
  while (std::getline(csv, line)) {
    const std::string data_line = trim_cr(line);
    if (data_line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(data_line);
    if (fields.size() != header.size()) {
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }

    ContextSnapshot snap;
    const double raw_t = parse_numeric(fields[col_t], "t_s", row);
    if (t0 && raw_t <= prev_raw_t) {
      throw ValidationError("row " + std::to_string(row) + ": non-increasing timestamp " +
                            format_double(raw_t));
    }
    prev_raw_t = raw_t;
    if (!t0) t0 = raw_t;
    snap.t_s = raw_t - *t0;

    snap.mobility.position.lat_deg =
        check_field(parse_numeric(fields[col_lat], "lat_deg", row), lat_spec, row, lenient);
    snap.mobility.position.lon_deg =
        check_field(parse_numeric(fields[col_lon], "lon_deg", row), lon_spec, row, lenient);
    snap.mobility.speed_mps =
        check_field(parse_numeric(fields[col_speed], "speed_mps", row), speed_spec, row, lenient);
    snap.mobility.heading_deg =
        normalize_heading_deg(parse_numeric(fields[col_heading], "heading_deg", row));

    snap.channel.rsrp_dbm =
        check_field(parse_numeric(fields[col_rsrp], "rsrp_dbm", row), rsrp_spec, row, lenient);
    snap.channel.rsrq_db =
        check_field(parse_numeric(fields[col_rsrq], "rsrq_db", row), rsrq_spec, row, lenient);
    snap.channel.snr_db =
        check_field(parse_numeric(fields[col_snr], "snr_db", row), snr_spec, row, lenient);

    const double cqi_raw = parse_numeric(fields[col_cqi], "cqi", row);
    if (!lenient && cqi_raw != std::nearbyint(cqi_raw)) {
      throw ValidationError("row " + std::to_string(row) + ": non-integer cqi " +
                            format_double(cqi_raw));
    }
    snap.channel.cqi = static_cast<int>(
        check_field(std::llround(cqi_raw), cqi_spec, row, lenient));

    if (col_cell) snap.cell_id = std::string(fields[*col_cell]);

    if (col_rate && !fields[*col_rate].empty()) {
      const double rate = parse_numeric(fields[*col_rate], "rate_mbps", row);
      if (rate > 0.0) {
        snap.rate_mbps = rate;
      } else if (!lenient) {
        throw ValidationError("row " + std::to_string(row) + ": rate_mbps = " +
                              format_double(rate) + " must be > 0");
      }
      // lenient: a non-positive rate is dropped, the row is kept
    }

    trace.snapshots.push_back(std::move(snap));
  }

  if (trace.snapshots.empty()) throw ValidationError("empty result: no data rows");
  return trace;
}

Trace parse_trace(const std::string& csv, const ColumnMap& columns, bool lenient) {
  std::istringstream in(csv);
  return parse_trace(in, columns, lenient);
}

Trace resample(const Trace& trace, double tick_s) {
  if (trace.empty()) throw ValidationError("resample: empty trace");
  if (!(tick_s > 0.0)) throw ValidationError("resample: tick_s must be > 0");

  const auto& src = trace.snapshots;
  Trace out;
  out.tick_s = tick_s;

  const double t_last = src.back().t_s;
  const auto ticks = static_cast<std::size_t>(std::floor(t_last / tick_s + 1e-9));
  out.snapshots.reserve(ticks + 1);

  std::size_t hi = 1;  // src[hi-1].t <= t <= src[hi].t while advancing
  for (std::size_t k = 0; k <= ticks; ++k) {
    const double t_out = static_cast<double>(k) * tick_s;
    const double t = std::min(t_out, t_last);  // guard the floor() epsilon
    while (hi < src.size() && src[hi].t_s < t) ++hi;

    ContextSnapshot snap;
    if (hi < src.size() && src[hi].t_s <= t) {
      snap = src[hi];  // exact hit on the right bracket sample
    } else if (t <= src[hi - 1].t_s) {
      snap = src[hi - 1];  // exact hit on the left bracket sample (includes k = 0)
    } else {
      const ContextSnapshot& a = src[hi - 1];
      const ContextSnapshot& b = src[hi];
      const double w = (t - a.t_s) / (b.t_s - a.t_s);
      snap.channel.rsrp_dbm = lerp(a.channel.rsrp_dbm, b.channel.rsrp_dbm, w);
      snap.channel.rsrq_db = lerp(a.channel.rsrq_db, b.channel.rsrq_db, w);
      snap.channel.snr_db = lerp(a.channel.snr_db, b.channel.snr_db, w);
      snap.channel.cqi = static_cast<int>(std::llround(lerp(a.channel.cqi, b.channel.cqi, w)));
      snap.mobility.position.lat_deg =
          lerp(a.mobility.position.lat_deg, b.mobility.position.lat_deg, w);
      snap.mobility.position.lon_deg =
          lerp(a.mobility.position.lon_deg, b.mobility.position.lon_deg, w);
      snap.mobility.speed_mps = lerp(a.mobility.speed_mps, b.mobility.speed_mps, w);
      snap.mobility.heading_deg = lerp_heading(a.mobility.heading_deg, b.mobility.heading_deg, w);
      snap.cell_id = (w <= 0.5) ? a.cell_id : b.cell_id;
      if (a.rate_mbps && b.rate_mbps) snap.rate_mbps = lerp(*a.rate_mbps, *b.rate_mbps, w);
    }
    snap.t_s = t_out;
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

void write_trace(const Trace& trace, std::ostream& out) {
  if (trace.empty()) throw ValidationError("write_trace: empty trace");
  const bool with_rate = std::any_of(trace.snapshots.begin(), trace.snapshots.end(),
                                     [](const ContextSnapshot& s) { return s.rate_mbps.has_value(); });

  out << "t_s,lat_deg,lon_deg,speed_mps,heading_deg,rsrp_dbm,rsrq_db,snr_db,cqi,cell_id";
  if (with_rate) out << ",rate_mbps";
  out << '\n';

  for (const ContextSnapshot& s : trace.snapshots) {
    require_csv_safe(s.cell_id, "cell_id");
    out << format_double(s.t_s) << ',' << format_double(s.mobility.position.lat_deg) << ','
        << format_double(s.mobility.position.lon_deg) << ','
        << format_double(s.mobility.speed_mps) << ',' << format_double(s.mobility.heading_deg)
        << ',' << format_double(s.channel.rsrp_dbm) << ',' << format_double(s.channel.rsrq_db)
        << ',' << format_double(s.channel.snr_db) << ',' << s.channel.cqi << ',' << s.cell_id;
    if (with_rate) {
      out << ',';
      if (s.rate_mbps) out << format_double(*s.rate_mbps);
    }
    out << '\n';
  }
}

std::string write_trace(const Trace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

}  // namespace catsim
