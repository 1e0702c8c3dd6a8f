#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>

#include "catsim/geo.hpp"
#include "catsim/trace.hpp"

namespace catsim {

/// Running means of everything observed inside one grid cell.
struct CellAggregate {
  std::uint64_t count = 0;
  double mean_rsrp_dbm = 0.0;
  double mean_rsrq_db = 0.0;
  double mean_snr_db = 0.0;
  double mean_cqi = 0.0;
  std::uint64_t rate_count = 0;  // snapshots that carried a ground-truth rate
  double mean_rate_mbps = 0.0;   // meaningful only when rate_count > 0

  std::optional<double> mean_rate() const {
    if (rate_count == 0) return std::nullopt;
    return mean_rate_mbps;
  }
};

struct GridKey {
  std::int64_t i = 0;  // east
  std::int64_t j = 0;  // north

  friend bool operator==(const GridKey&, const GridKey&) = default;
};

struct GridKeyHash {
  std::size_t operator()(const GridKey& k) const {
    return std::hash<std::int64_t>{}(k.i) ^ (std::hash<std::int64_t>{}(k.j) * 0x9e3779b97f4a7c15ULL);
  }
};

/// Sparse geospatial aggregation of observed indicators and rates
/// ("map knowledge"). Positions are projected to local planar meters about
/// the first ingested sample; cell (i, j) = (floor(x/size), floor(y/size)).
/// Immutable once built; lookups are thread-safe.
struct GridMap {
  GeoPosition origin;
  double cell_size_m = 0.0;
  std::unordered_map<GridKey, CellAggregate, GridKeyHash> cells;

  GridKey key_for(GeoPosition pos) const;
  GeoPosition cell_center(GridKey key) const;

  /// Aggregate of the cell containing `pos`, or nullptr when nothing was
  /// observed there.
  const CellAggregate* lookup(GeoPosition pos) const;
};

/// Aggregates all snapshots of all traces, in input order.
GridMap build_map(std::span<const Trace> traces, double cell_size_m);

/// Plot-ready export, rows sorted by (i, j). Header:
///   i,j,center_lat,center_lon,count,mean_rsrp,mean_rsrq,mean_snr,mean_cqi,mean_rate_mbps
/// mean_rate_mbps is left empty for cells that never observed a rate.
void write_gridmap_csv(const GridMap& map, std::ostream& out);

}  // namespace catsim
