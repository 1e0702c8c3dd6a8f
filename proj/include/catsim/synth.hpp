#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catsim/geo.hpp"
#include "catsim/trace.hpp"

namespace catsim {

/// Transmitter with a log-distance path-loss model:
///   rsrp(d) = tx_power - (ref_loss + 10 * n * log10(d)) + shadowing
struct CellSite {
  GeoPosition position;
  double tx_power_dbm = 40.0;        // [0, 60]
  double path_loss_exponent = 3.0;   // [1.5, 6]
  double ref_loss_db = 30.0;         // loss at 1 m
};

/// Synthetic drive scenario: a vehicle follows `waypoints` at piecewise-
/// constant speed, one context snapshot per tick. The seeded shadowing draw
/// is the only source of randomness; identical seeds give byte-identical
/// traces.
struct Scenario {
  std::vector<CellSite> cells;
  std::vector<GeoPosition> waypoints;
  std::vector<double> leg_speeds_mps;  // one entry per leg (waypoints - 1)
  double tick_s = 1.0;
  double shadowing_sigma_db = 4.0;
  double noise_floor_dbm = -100.0;
  double rate_max_mbps = 50.0;
  std::uint64_t seed = 0;
};

struct LinkQuality {
  double snr_db = 0.0;
  int cqi = 0;
  double rate_mbps = 0.0;
};

/// Received power from `cell` at `pos` in dBm, clamped to the reporting
/// range [-140, -44]. Distances below 1 m are clamped to 1 m.
double rsrp_at(GeoPosition pos, const CellSite& cell, double shadowing_db);

/// Ground-truth link quality from received power:
///   snr  = clamp(rsrp - noise_floor, -10, 30)
///   cqi  = round(15 * (snr + 10) / 40), clamped to 0..15
///   rate = max(rate_max * (cqi / 15)^2, 0.1) Mbit/s
LinkQuality derive_link(double rsrp_dbm, double noise_floor_dbm, double rate_max_mbps = 50.0);

/// RSRQ is synthesized as an affine map of SNR onto [-19.5, -3]; it exists so
/// metric code paths over all four indicators are exercised.
double rsrq_from_snr(double snr_db);

/// Runs the scenario and returns the generated trace (tick_s set). The
/// serving cell is the RSRP argmax (ties to the lowest cell index) under a
/// single per-tick shadowing draw applied to all cells.
Trace generate_trace(const Scenario& scenario);

void validate_scenario(const Scenario& scenario);

}  // namespace catsim
