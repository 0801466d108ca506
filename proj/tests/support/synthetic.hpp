#pragma once

// Synthetic AIS fleets for tests: vessels on straight lon/lat courses at
// steady speed, with optional injected duplicates, GPS spikes, stops,
// long gaps and speed jitter.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flpxr/ais.hpp"
#include "flpxr/geo.hpp"

namespace flpxr::testsupport {

struct FleetOptions {
  int vessels = 10;
  std::uint32_t seed = 42;
  double min_speed_kn = 5.0;
  double max_speed_kn = 25.0;
  std::int64_t start_time = 1'600'000'000;
  std::int64_t duration_s = 3 * 3600;
  std::int64_t sample_interval_s = 90;
  bool jitter_interval = false;       // random 10..60 s gaps instead
  double speed_jitter_kn = 0.0;       // zero-mean per-step course noise
  double spike_probability = 0.0;     // teleported one-off points
  double duplicate_probability = 0.0; // repeated timestamps
  double stop_probability = 0.0;      // start of a stationary episode
  double gap_probability = 0.0;       // transmission gap > 45 min
  bool assign_types = false;
  double lon_min = -8.0, lon_max = 8.0;
  double lat_min = 30.0, lat_max = 55.0;
};

struct SyntheticFleet {
  std::vector<AisRecord> records;  // grouped by vessel, ascending time
  std::map<std::string, int> vessel_types;
};

// Velocity in degrees/second for a ground speed along a bearing at the
// given latitude.
inline std::pair<double, double> course_velocity_deg_s(double speed_kn,
                                                       double bearing_deg,
                                                       double lat) {
  const double ms = speed_kn * kKnotMs;
  const double north_ms = ms * std::cos(deg2rad(bearing_deg));
  const double east_ms = ms * std::sin(deg2rad(bearing_deg));
  const double dlat = rad2deg(north_ms / kEarthRadiusM);
  const double dlon = rad2deg(east_ms / (kEarthRadiusM * std::cos(deg2rad(lat))));
  return {dlon, dlat};
}

inline SyntheticFleet make_fleet(const FleetOptions& opt) {
  SyntheticFleet fleet;
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> lon_d(opt.lon_min, opt.lon_max);
  std::uniform_real_distribution<double> lat_d(opt.lat_min, opt.lat_max);
  std::uniform_real_distribution<double> speed_d(opt.min_speed_kn,
                                                 opt.max_speed_kn);
  std::uniform_real_distribution<double> bearing_d(0.0, 360.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int v = 0; v < opt.vessels; ++v) {
    const std::string vessel_id = std::to_string(100000 + v);
    if (opt.assign_types) {
      fleet.vessel_types[vessel_id] = 30 + (v % 4) * 10;
    }
    double lon = lon_d(rng);
    double lat = lat_d(rng);
    const double speed = speed_d(rng);
    const double bearing = bearing_d(rng);
    auto [vlon, vlat] = course_velocity_deg_s(speed, bearing, lat);

    std::int64_t t = opt.start_time;
    const std::int64_t t_end = opt.start_time + opt.duration_s;
    int stop_steps = 0;
    while (t <= t_end) {
      const double r = unit(rng);
      if (stop_steps == 0 && opt.stop_probability > 0.0 &&
          r < opt.stop_probability) {
        stop_steps = 5 + static_cast<int>(unit(rng) * 5);
      }

      AisRecord rec;
      rec.vessel_id = vessel_id;
      rec.timestamp = t;
      rec.pos = GeoPoint{lon, lat};
      fleet.records.push_back(rec);

      if (opt.duplicate_probability > 0.0 &&
          unit(rng) < opt.duplicate_probability) {
        AisRecord dup = rec;
        dup.pos.lon += 1e-4;  // conflicting duplicate
        fleet.records.push_back(dup);
      }
      if (opt.spike_probability > 0.0 && unit(rng) < opt.spike_probability) {
        AisRecord spike = rec;
        spike.timestamp = t + 1;
        spike.pos.lon += 0.5 + unit(rng);  // far off-course teleport
        fleet.records.push_back(spike);
      }

      std::int64_t dt = opt.sample_interval_s;
      if (opt.jitter_interval) {
        dt = 10 + static_cast<std::int64_t>(unit(rng) * 50.0);
      }
      if (opt.gap_probability > 0.0 && unit(rng) < opt.gap_probability) {
        dt += 2700 + static_cast<std::int64_t>(unit(rng) * 1800.0);
      }

      double step_speed = speed;
      if (stop_steps > 0) {
        step_speed = 0.2;  // below any sensible s_min
        --stop_steps;
      } else if (opt.speed_jitter_kn > 0.0) {
        std::normal_distribution<double> jitter(0.0, opt.speed_jitter_kn);
        step_speed = std::max(1.5, speed + jitter(rng));
      }
      const double scale = step_speed / speed;
      lon += vlon * scale * static_cast<double>(dt);
      lat += vlat * scale * static_cast<double>(dt);
      t += dt;
    }
  }
  return fleet;
}

}  // namespace flpxr::testsupport
