#include "catsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catsim/error.hpp"
#include "catsim/rng.hpp"

namespace catsim {

namespace {

struct Leg {
  XY from, to;
  double length_m;
  double speed_mps;
  double heading_deg;
  double start_time_s;  // cumulative time at leg start
};

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

double rsrp_at(GeoPosition pos, const CellSite& cell, double shadowing_db) {
  const double d = std::max(distance_m(pos, cell.position), 1.0);
  const double path_loss = cell.ref_loss_db + 10.0 * cell.path_loss_exponent * std::log10(d);
  return clamp(cell.tx_power_dbm - path_loss + shadowing_db, kRsrpMinDbm, kRsrpMaxDbm);
}

LinkQuality derive_link(double rsrp_dbm, double noise_floor_dbm, double rate_max_mbps) {
  LinkQuality link;
  link.snr_db = clamp(rsrp_dbm - noise_floor_dbm, kSnrMinDb, kSnrMaxDb);
  link.cqi = static_cast<int>(
      clamp(std::llround(15.0 * (link.snr_db + 10.0) / 40.0), kCqiMin, kCqiMax));
  const double frac = static_cast<double>(link.cqi) / 15.0;
  link.rate_mbps = std::max(rate_max_mbps * frac * frac, 0.1);
  return link;
}

double rsrq_from_snr(double snr_db) {
  const double w = (clamp(snr_db, kSnrMinDb, kSnrMaxDb) - kSnrMinDb) / (kSnrMaxDb - kSnrMinDb);
  return kRsrqMinDb + w * (kRsrqMaxDb - kRsrqMinDb);
}

void validate_scenario(const Scenario& s) {
  if (s.cells.empty()) throw ValidationError("scenario: needs at least one cell");
  if (s.waypoints.size() < 2) throw ValidationError("scenario: needs at least two waypoints");
  if (!(s.tick_s > 0.0)) throw ValidationError("scenario: tick_s must be > 0");
  if (s.shadowing_sigma_db < 0.0) throw ValidationError("scenario: shadowing_sigma_db must be >= 0");
  if (!(s.rate_max_mbps > 0.0)) throw ValidationError("scenario: rate_max_mbps must be > 0");
  if (s.leg_speeds_mps.size() != s.waypoints.size() - 1) {
    throw ValidationError("scenario: expected " + std::to_string(s.waypoints.size() - 1) +
                          " leg speeds, got " + std::to_string(s.leg_speeds_mps.size()));
  }
  for (double v : s.leg_speeds_mps) {
    if (!(v > 0.0)) throw ValidationError("scenario: leg speeds must be > 0");
  }
  for (const CellSite& c : s.cells) {
    if (c.tx_power_dbm < 0.0 || c.tx_power_dbm > 60.0) {
      throw ValidationError("scenario: cell tx_power_dbm outside [0, 60]");
    }
    if (c.path_loss_exponent < 1.5 || c.path_loss_exponent > 6.0) {
      throw ValidationError("scenario: path_loss_exponent outside [1.5, 6]");
    }
  }
}

Trace generate_trace(const Scenario& scenario) {
  validate_scenario(scenario);

  const LocalProjection proj(scenario.waypoints.front());
  std::vector<Leg> legs;
  legs.reserve(scenario.waypoints.size() - 1);
  double total_time = 0.0;
  for (std::size_t i = 0; i + 1 < scenario.waypoints.size(); ++i) {
    Leg leg;
    leg.from = proj.to_xy(scenario.waypoints[i]);
    leg.to = proj.to_xy(scenario.waypoints[i + 1]);
    const double dx = leg.to.x_m - leg.from.x_m;
    const double dy = leg.to.y_m - leg.from.y_m;
    leg.length_m = std::hypot(dx, dy);
    leg.speed_mps = scenario.leg_speeds_mps[i];
    leg.heading_deg = normalize_heading_deg(std::atan2(dx, dy) / kDegToRad);
    leg.start_time_s = total_time;
    if (leg.length_m > 0.0) total_time += leg.length_m / leg.speed_mps;
    legs.push_back(leg);
  }
  if (total_time <= 0.0) throw ValidationError("scenario: degenerate route (zero total length)");

  Rng shadow_rng(scenario.seed, "synth.shadowing");
  const auto ticks = static_cast<std::size_t>(std::floor(total_time / scenario.tick_s + 1e-9));

  Trace trace;
  trace.tick_s = scenario.tick_s;
  trace.snapshots.reserve(ticks + 1);

  std::size_t leg_idx = 0;
  for (std::size_t k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * scenario.tick_s;

    // Advance to the leg containing t; zero-length legs are skipped.
    while (leg_idx + 1 < legs.size() &&
           (legs[leg_idx].length_m == 0.0 ||
            t >= legs[leg_idx].start_time_s + legs[leg_idx].length_m / legs[leg_idx].speed_mps)) {
      ++leg_idx;
    }
    const Leg& leg = legs[leg_idx];
    const double into_leg = std::min((t - leg.start_time_s) * leg.speed_mps, leg.length_m);
    const double w = leg.length_m > 0.0 ? into_leg / leg.length_m : 0.0;
    const XY pos_xy{leg.from.x_m + w * (leg.to.x_m - leg.from.x_m),
                    leg.from.y_m + w * (leg.to.y_m - leg.from.y_m)};
    const GeoPosition pos = proj.from_xy(pos_xy);

    const double shadowing = shadow_rng.gaussian() * scenario.shadowing_sigma_db;
    std::size_t serving = 0;
    double best_rsrp = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < scenario.cells.size(); ++c) {
      const double rsrp = rsrp_at(pos, scenario.cells[c], shadowing);
      if (rsrp > best_rsrp) {
        best_rsrp = rsrp;
        serving = c;
      }
    }

    const LinkQuality link = derive_link(best_rsrp, scenario.noise_floor_dbm, scenario.rate_max_mbps);

    ContextSnapshot snap;
    snap.t_s = t;
    snap.channel = {best_rsrp, rsrq_from_snr(link.snr_db), link.snr_db, link.cqi};
    snap.mobility = {pos, leg.speed_mps, leg.heading_deg};
    snap.cell_id = "cell" + std::to_string(serving);
    snap.rate_mbps = link.rate_mbps;
    trace.snapshots.push_back(std::move(snap));
  }
  return trace;
}

}  // namespace catsim
