#pragma once

#include <cmath>

namespace flpxr {

// Mean earth radius. All distances in the library are great-circle
// distances on this sphere, so they are mutually consistent.
inline constexpr double kEarthRadiusM = 6'371'000.0;

// 1 knot in m/s.
inline constexpr double kKnotMs = 0.514444;

inline constexpr double deg2rad(double d) { return d * (M_PI / 180.0); }
inline constexpr double rad2deg(double r) { return r * (180.0 / M_PI); }

struct GeoPoint {
  double lon = 0.0;  // degrees, [-180, 180]
  double lat = 0.0;  // degrees, [-90, 90]

  bool valid() const {
    return std::isfinite(lon) && std::isfinite(lat) && lon >= -180.0 &&
           lon <= 180.0 && lat >= -90.0 && lat <= 90.0;
  }
  bool operator==(const GeoPoint&) const = default;
};

// Great-circle distance in meters (haversine). Symmetric, non-negative.
// Throws InvalidInput on non-finite coordinates.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Initial great-circle bearing from a to b, degrees clockwise from true
// north, in [0, 360). Throws InvalidInput when a == b coordinate-wise
// (the bearing is undefined; callers substitute the previous bearing).
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

// haversine_m(a, b) / dt in knots. Throws InvalidInput when dt <= 0.
double speed_knots(const GeoPoint& a, const GeoPoint& b, double dt_s);

// Forward great-circle projection: the point `distance_m` meters from
// `origin` along `bearing_deg`. Distance 0 returns the origin exactly.
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg,
                           double distance_m);

// Component-wise linear interpolation in raw lon/lat (not along the
// great circle). f must be in [0, 1].
GeoPoint lerp_point(const GeoPoint& a, const GeoPoint& b, double f);

}  // namespace flpxr
