#include "catsim/geomap.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "catsim/error.hpp"
#include "catsim/text.hpp"

namespace catsim {

GridKey GridMap::key_for(GeoPosition pos) const {
  const XY xy = LocalProjection(origin).to_xy(pos);
  return {static_cast<std::int64_t>(std::floor(xy.x_m / cell_size_m)),
          static_cast<std::int64_t>(std::floor(xy.y_m / cell_size_m))};
}

GeoPosition GridMap::cell_center(GridKey key) const {
  const XY center{(static_cast<double>(key.i) + 0.5) * cell_size_m,
                  (static_cast<double>(key.j) + 0.5) * cell_size_m};
  return LocalProjection(origin).from_xy(center);
}

const CellAggregate* GridMap::lookup(GeoPosition pos) const {
  const auto it = cells.find(key_for(pos));
  return it == cells.end() ? nullptr : &it->second;
}

GridMap build_map(std::span<const Trace> traces, double cell_size_m) {
  if (!(cell_size_m > 0.0)) throw ValidationError("build_map: cell_size_m must be > 0");

  GridMap map;
  map.cell_size_m = cell_size_m;

  bool have_origin = false;
  for (const Trace& trace : traces) {
    for (const ContextSnapshot& s : trace.snapshots) {
      if (!have_origin) {
        map.origin = s.mobility.position;
        have_origin = true;
      }
      CellAggregate& cell = map.cells[map.key_for(s.mobility.position)];
      ++cell.count;
      const double n = static_cast<double>(cell.count);
      cell.mean_rsrp_dbm += (s.channel.rsrp_dbm - cell.mean_rsrp_dbm) / n;
      cell.mean_rsrq_db += (s.channel.rsrq_db - cell.mean_rsrq_db) / n;
      cell.mean_snr_db += (s.channel.snr_db - cell.mean_snr_db) / n;
      cell.mean_cqi += (s.channel.cqi - cell.mean_cqi) / n;
      if (s.rate_mbps) {
        ++cell.rate_count;
        cell.mean_rate_mbps += (*s.rate_mbps - cell.mean_rate_mbps) / static_cast<double>(cell.rate_count);
      }
    }
  }
  if (!have_origin) throw ValidationError("build_map: all traces empty");
  return map;
}

void write_gridmap_csv(const GridMap& map, std::ostream& out) {
  std::vector<GridKey> keys;
  keys.reserve(map.cells.size());
  for (const auto& [key, _] : map.cells) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const GridKey& a, const GridKey& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  out << "i,j,center_lat,center_lon,count,mean_rsrp,mean_rsrq,mean_snr,mean_cqi,mean_rate_mbps\n";
  for (const GridKey& key : keys) {
    const CellAggregate& cell = map.cells.at(key);
    const GeoPosition center = map.cell_center(key);
    out << key.i << ',' << key.j << ',' << format_double(center.lat_deg) << ','
        << format_double(center.lon_deg) << ',' << cell.count << ','
        << format_double(cell.mean_rsrp_dbm) << ',' << format_double(cell.mean_rsrq_db) << ','
        << format_double(cell.mean_snr_db) << ',' << format_double(cell.mean_cqi) << ',';
    if (cell.rate_count > 0) out << format_double(cell.mean_rate_mbps);
    out << '\n';
  }
}

}  // namespace catsim
