#include "catsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "catsim/error.hpp"

namespace catsim {

namespace {

using nlohmann::json;

json parse_json_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

json load_json_file(const std::string& path, const char* what) {
  return parse_json_text(read_text_file(path), what);
}

GeoPosition position_from_json(const json& j) {
  GeoPosition pos{j.at("lat_deg").get<double>(), j.at("lon_deg").get<double>()};
  if (pos.lat_deg < -90.0 || pos.lat_deg > 90.0 || pos.lon_deg < -180.0 || pos.lon_deg > 180.0) {
    throw ValidationError("position out of range: lat " + std::to_string(pos.lat_deg) + ", lon " +
                          std::to_string(pos.lon_deg));
  }
  return pos;
}

MetricSpec metric_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "single") {
    const std::string name = j.at("indicator").get<std::string>();
    const auto ind = indicator_from_name(name);
    if (!ind) throw ValidationError("metric: unknown indicator '" + name + "'");
    return SingleMetric{*ind};
  }
  if (kind == "weighted") {
    WeightedMetric metric;
    for (const auto& [name, value] : j.at("weights").items()) {
      const auto ind = indicator_from_name(name);
      if (!ind) throw ValidationError("metric: unknown indicator '" + name + "'");
      metric.weights[*ind] = value.get<double>();
    }
    return metric;
  }
  if (kind == "predicted_rate") {
    return PredictedRateMetric{j.value("rate_max_mbps", 50.0)};
  }
  throw ValidationError("metric: unknown kind '" + kind + "'");
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading file: " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw IoError("failed writing file: " + path);
}

Scenario scenario_from_json_text(const std::string& json_text) {
  const json doc = parse_json_text(json_text, "scenario file");
  try {
    Scenario s;
    s.seed = doc.value("seed", std::uint64_t{0});
    s.tick_s = doc.value("tick_s", 1.0);
    s.shadowing_sigma_db = doc.value("shadowing_sigma_db", 4.0);
    s.noise_floor_dbm = doc.value("noise_floor_dbm", -100.0);
    s.rate_max_mbps = doc.value("rate_max_mbps", 50.0);
    for (const auto& cell_json : doc.at("cells")) {
      CellSite cell;
      cell.position = position_from_json(cell_json);
      cell.tx_power_dbm = cell_json.value("tx_power_dbm", 40.0);
      cell.path_loss_exponent = cell_json.value("path_loss_exponent", 3.0);
      cell.ref_loss_db = cell_json.value("ref_loss_db", 30.0);
      s.cells.push_back(cell);
    }
    for (const auto& wp : doc.at("waypoints")) s.waypoints.push_back(position_from_json(wp));

    const auto& speed = doc.at("speed_mps");
    const std::size_t legs = s.waypoints.empty() ? 0 : s.waypoints.size() - 1;
    if (speed.is_array()) {
      s.leg_speeds_mps = speed.get<std::vector<double>>();
    } else {
      s.leg_speeds_mps.assign(legs, speed.get<double>());
    }
    validate_scenario(s);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario file: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  return scenario_from_json_text(read_text_file(path));
}

ColumnMap load_column_map_file(const std::string& path) {
  const json doc = load_json_file(path, "column map");
  ColumnMap map;
  for (const auto& [canonical, source] : doc.items()) {
    const std::string value = source.get<std::string>();
    if (canonical == "t_s") map.t = value;
    else if (canonical == "lat_deg") map.lat = value;
    else if (canonical == "lon_deg") map.lon = value;
    else if (canonical == "speed_mps") map.speed = value;
    else if (canonical == "heading_deg") map.heading = value;
    else if (canonical == "rsrp_dbm") map.rsrp = value;
    else if (canonical == "rsrq_db") map.rsrq = value;
    else if (canonical == "snr_db") map.snr = value;
    else if (canonical == "cqi") map.cqi = value;
    else if (canonical == "cell_id") map.cell_id = value;
    else if (canonical == "rate_mbps") map.rate = value;
    else throw ValidationError("column map: unknown canonical column '" + canonical + "'");
  }
  return map;
}

RunSpec run_spec_from_json_text(const std::string& json_text) {
  const json doc = parse_json_text(json_text, "run config");
  try {
    RunSpec spec;
    spec.sim.tick_s = doc.value("tick_s", 1.0);
    spec.sim.sensor_rate_Bps = doc.value("sensor_rate_Bps", std::uint64_t{10000});
    spec.sim.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("geomap")) spec.geomap_path = doc["geomap"].get<std::string>();

    if (doc.contains("bounds")) {
      for (const auto& [name, range] : doc["bounds"].items()) {
        const auto ind = indicator_from_name(name);
        if (!ind) throw ValidationError("run config: unknown indicator '" + name + "' in bounds");
        if (!range.is_array() || range.size() != 2) {
          throw ValidationError("run config: bounds." + name + " must be [lo, hi]");
        }
        IndicatorBounds b{range[0].get<double>(), range[1].get<double>()};
        if (!(b.lo < b.hi)) throw ValidationError("run config: bounds." + name + ": lo must be < hi");
        switch (*ind) {
          case Indicator::kRsrp: spec.sim.bounds.rsrp = b; break;
          case Indicator::kRsrq: spec.sim.bounds.rsrq = b; break;
          case Indicator::kSnr: spec.sim.bounds.snr = b; break;
          case Indicator::kCqi: spec.sim.bounds.cqi = b; break;
        }
      }
    }

    const auto& policy = doc.at("policy");
    const std::string kind = policy.at("kind").get<std::string>();
    if (kind == "periodic") {
      spec.sim.policy = PeriodicPolicy{policy.at("interval_s").get<double>()};
    } else if (kind == "cat") {
      CatPolicy cat;
      cat.params.alpha = policy.value("alpha", 2.0);
      cat.params.t_min_s = policy.value("t_min_s", 10.0);
      cat.params.t_max_s = policy.value("t_max_s", 120.0);
      const auto& metric_json = policy.at("metric");
      cat.metric = metric_from_json(metric_json);
      if (std::holds_alternative<PredictedRateMetric>(cat.metric)) {
        if (!metric_json.contains("model")) {
          throw ValidationError("run config: predicted_rate metric needs a \"model\" path");
        }
        spec.model_path = metric_json["model"].get<std::string>();
      }
      spec.sim.policy = std::move(cat);
    } else {
      throw ValidationError("run config: unknown policy kind '" + kind + "'");
    }
    validate_policy(spec.sim.policy);
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
}

RunSpec load_run_spec_file(const std::string& path) {
  return run_spec_from_json_text(read_text_file(path));
}

std::string gridmap_to_json(const GridMap& map) {
  std::vector<GridKey> keys;
  keys.reserve(map.cells.size());
  for (const auto& [key, _] : map.cells) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const GridKey& a, const GridKey& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  json doc;
  doc["version"] = 1;
  doc["origin"] = {{"lat_deg", map.origin.lat_deg}, {"lon_deg", map.origin.lon_deg}};
  doc["cell_size_m"] = map.cell_size_m;
  json cells = json::array();
  for (const GridKey& key : keys) {
    const CellAggregate& cell = map.cells.at(key);
    json c;
    c["i"] = key.i;
    c["j"] = key.j;
    c["count"] = cell.count;
    c["mean_rsrp_dbm"] = cell.mean_rsrp_dbm;
    c["mean_rsrq_db"] = cell.mean_rsrq_db;
    c["mean_snr_db"] = cell.mean_snr_db;
    c["mean_cqi"] = cell.mean_cqi;
    c["rate_count"] = cell.rate_count;
    c["mean_rate_mbps"] = cell.mean_rate_mbps;
    cells.push_back(std::move(c));
  }
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

GridMap gridmap_from_json(const std::string& json_text) {
  const json doc = parse_json_text(json_text, "geomap file");
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ValidationError("geomap file: unsupported version " + doc["version"].dump());
    }
    GridMap map;
    map.origin = {doc.at("origin").at("lat_deg").get<double>(),
                  doc.at("origin").at("lon_deg").get<double>()};
    map.cell_size_m = doc.at("cell_size_m").get<double>();
    if (!(map.cell_size_m > 0.0)) throw ValidationError("geomap file: cell_size_m must be > 0");
    for (const auto& c : doc.at("cells")) {
      GridKey key{c.at("i").get<std::int64_t>(), c.at("j").get<std::int64_t>()};
      CellAggregate cell;
      cell.count = c.at("count").get<std::uint64_t>();
      if (cell.count == 0) throw ValidationError("geomap file: cell with zero count");
      cell.mean_rsrp_dbm = c.at("mean_rsrp_dbm").get<double>();
      cell.mean_rsrq_db = c.at("mean_rsrq_db").get<double>();
      cell.mean_snr_db = c.at("mean_snr_db").get<double>();
      cell.mean_cqi = c.at("mean_cqi").get<double>();
      cell.rate_count = c.at("rate_count").get<std::uint64_t>();
      cell.mean_rate_mbps = c.at("mean_rate_mbps").get<double>();
      map.cells.emplace(key, cell);
    }
    return map;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("geomap file: ") + e.what());
  }
}

void save_gridmap(const GridMap& map, const std::string& path) {
  write_text_file(path, gridmap_to_json(map));
}

GridMap load_gridmap(const std::string& path) {
  return gridmap_from_json(read_text_file(path));
}

Trace load_trace_file(const std::string& path, const ColumnMap& columns, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path);
  try {
    return parse_trace(in, columns, lenient);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_trace_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trace file for writing: " + path);
  write_trace(trace, out);
  if (!out) throw IoError("failed writing trace file: " + path);
}

}  // namespace catsim
