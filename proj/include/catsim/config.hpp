#pragma once

#include <optional>
#include <string>

#include "catsim/geomap.hpp"
#include "catsim/sim.hpp"
#include "catsim/synth.hpp"
#include "catsim/trace.hpp"

namespace catsim {

// All structured config files are JSON. Flags override file values; paths
// are resolved as given (relative to the working directory).

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Scenario file schema:
/// {
///   "seed": 42, "tick_s": 1.0,
///   "shadowing_sigma_db": 4.0, "noise_floor_dbm": -100.0, "rate_max_mbps": 50.0,
///   "cells": [{"lat_deg":..,"lon_deg":..,"tx_power_dbm":..,
///              "path_loss_exponent":..,"ref_loss_db":..}, ...],
///   "waypoints": [{"lat_deg":..,"lon_deg":..}, ...],
///   "speed_mps": 30.0            // scalar, or array with one entry per leg
/// }
Scenario load_scenario_file(const std::string& path);
Scenario scenario_from_json_text(const std::string& json_text);

/// Column-map file: flat object mapping canonical column names to source
/// header names, e.g. {"t_s": "timestamp", "rsrp_dbm": "RSRP"}. Unmentioned
/// names keep their canonical spelling.
ColumnMap load_column_map_file(const std::string& path);

/// Simulation run config:
/// {
///   "tick_s": 1.0, "sensor_rate_Bps": 10000, "seed": 42,
///   "policy": {"kind": "periodic", "interval_s": 30.0}
///           | {"kind": "cat", "alpha": 2.0, "t_min_s": 10.0, "t_max_s": 120.0,
///              "metric": {"kind": "single", "indicator": "snr"}
///                      | {"kind": "weighted", "weights": {"snr": 1.0, "cqi": 2.0}}
///                      | {"kind": "predicted_rate", "rate_max_mbps": 50.0,
///                         "model": "model.json"}},
///   "bounds": {"snr": [-10, 30], ...},  // optional normalization overrides
///   "geomap": "map.json"                // optional
/// }
struct RunSpec {
  SimConfig sim;  // predictor/geomap pointers unset; see the paths below
  std::optional<std::string> model_path;
  std::optional<std::string> geomap_path;
};
RunSpec load_run_spec_file(const std::string& path);
RunSpec run_spec_from_json_text(const std::string& json_text);

/// Full-fidelity GridMap persistence (the CSV export is plot-only and not
/// reloadable).
std::string gridmap_to_json(const GridMap& map);
GridMap gridmap_from_json(const std::string& json_text);
void save_gridmap(const GridMap& map, const std::string& path);
GridMap load_gridmap(const std::string& path);

Trace load_trace_file(const std::string& path, const ColumnMap& columns = {},
                      bool lenient = false);
void save_trace_file(const Trace& trace, const std::string& path);

}  // namespace catsim
