#include "flpxr/geo.hpp"

#include <cmath>

#include "flpxr/error.hpp"

namespace flpxr {

namespace {

void require_finite(const GeoPoint& p, const char* who) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
    throw InvalidInput(std::string(who) + ": non-finite coordinate");
  }
}

// Wrap a longitude into [-180, 180].
double wrap_lon(double lon) {
  double l = std::fmod(lon + 540.0, 360.0);
  if (l < 0.0) l += 360.0;
  return l - 180.0;
}

}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  require_finite(a, "haversine_m");
  require_finite(b, "haversine_m");
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(0.5 * dphi);
  const double s2 = std::sin(0.5 * dlam);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  const double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
  return kEarthRadiusM * c;
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
  require_finite(a, "initial_bearing_deg");
  require_finite(b, "initial_bearing_deg");
  if (a.lon == b.lon && a.lat == b.lat) {
    throw InvalidInput("initial_bearing_deg: bearing undefined for identical points");
  }
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  double deg = rad2deg(std::atan2(y, x));
  deg = std::fmod(deg + 360.0, 360.0);
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

double speed_knots(const GeoPoint& a, const GeoPoint& b, double dt_s) {
  if (!(dt_s > 0.0)) {
    throw InvalidInput("speed_knots: interval must be positive");
  }
  return haversine_m(a, b) / dt_s / kKnotMs;
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg,
                           double distance_m) {
  require_finite(origin, "destination_point");
  if (!(distance_m >= 0.0)) {
    throw InvalidInput("destination_point: distance must be non-negative");
  }
  if (distance_m == 0.0) return origin;
  const double delta = distance_m / kEarthRadiusM;
  const double theta = deg2rad(bearing_deg);
  const double phi1 = deg2rad(origin.lat);
  const double lam1 = deg2rad(origin.lon);
  const double sin_phi2 = std::sin(phi1) * std::cos(delta) +
                          std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lam2 =
      lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                        std::cos(delta) - std::sin(phi1) * sin_phi2);
  return GeoPoint{wrap_lon(rad2deg(lam2)), rad2deg(phi2)};
}

GeoPoint lerp_point(const GeoPoint& a, const GeoPoint& b, double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw InvalidInput("lerp_point: fraction outside [0, 1]");
  }
  if (f == 0.0) return a;
  if (f == 1.0) return b;
  return GeoPoint{a.lon + f * (b.lon - a.lon), a.lat + f * (b.lat - a.lat)};
}

}  // namespace flpxr
