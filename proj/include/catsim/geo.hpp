#pragma once

#include <cmath>
#include <utility>

namespace catsim {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDegToRad = M_PI / 180.0;

/// WGS84 position in degrees. lat in [-90, 90], lon in [-180, 180].
struct GeoPosition {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const GeoPosition&, const GeoPosition&) = default;
};

struct XY {
  double x_m = 0.0;  // east
  double y_m = 0.0;  // north
};

/// Equirectangular local projection about a fixed origin. Adequate at route
/// scale (a few tens of km); all geospatial math in the project goes through
/// this so results are reproducible and testable by hand.
class LocalProjection {
 public:
  explicit LocalProjection(GeoPosition origin)
      : origin_(origin), cos_lat0_(std::cos(origin.lat_deg * kDegToRad)) {}

  XY to_xy(GeoPosition p) const {
    return {(p.lon_deg - origin_.lon_deg) * kDegToRad * kEarthRadiusM * cos_lat0_,
            (p.lat_deg - origin_.lat_deg) * kDegToRad * kEarthRadiusM};
  }

  GeoPosition from_xy(XY p) const {
    return {origin_.lat_deg + p.y_m / (kDegToRad * kEarthRadiusM),
            origin_.lon_deg + p.x_m / (kDegToRad * kEarthRadiusM * cos_lat0_)};
  }

  GeoPosition origin() const { return origin_; }

 private:
  GeoPosition origin_;
  double cos_lat0_;
};

/// Planar distance in meters, projected about `a`.
inline double distance_m(GeoPosition a, GeoPosition b) {
  const XY d = LocalProjection(a).to_xy(b);
  return std::hypot(d.x_m, d.y_m);
}

}  // namespace catsim
