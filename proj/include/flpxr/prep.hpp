#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "flpxr/ais.hpp"
#include "flpxr/geo.hpp"

namespace flpxr {

// Cleaning / resampling thresholds. Defaults are the values the pipeline
// is normally run with: 1-50 kt speed window, 45 min gap, 30-point
// minimum trip length, 1 NM POI radius, 90 s sampling rate.
struct PrepConfig {
  double s_min_kn = 1.0;
  double s_max_kn = 50.0;
  std::int64_t gap_max_s = 2700;
  int length_min = 30;
  double d_min_m = 1852.0;
  std::int64_t rate_s = 90;

  // Throws ConfigError if any invariant is violated.
  void validate() const;
};

// Cleaned position annotated with computed kinematics.
struct KinematicPoint {
  std::int64_t timestamp = 0;
  GeoPoint pos;
  double speed_kn = 0.0;
  double bearing_deg = 0.0;

  bool operator==(const KinematicPoint&) const = default;
};

// A segmented, fixed-rate-resampled voyage of one vessel.
struct Trip {
  std::string vessel_id;
  int trip_id = 0;  // sequential per vessel
  std::optional<int> vessel_type;
  std::optional<int> origin_poi;
  GeoPoint start_pos;  // first raw point of the trip
  std::vector<KinematicPoint> points;  // exact rate_s spacing
};

// Per-stage drop counters. Every input record lands in exactly one
// bucket, so records_in always equals the sum of the five dropped
// counters plus raw_points_in_trips.
struct PrepStats {
  std::uint64_t records_in = 0;
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t outliers_dropped = 0;
  std::uint64_t stationary_dropped = 0;
  std::uint64_t short_trip_points_dropped = 0;
  std::uint64_t degenerate_trip_points_dropped = 0;
  std::uint64_t raw_points_in_trips = 0;

  std::uint64_t short_trips_dropped = 0;
  std::uint64_t degenerate_trips_dropped = 0;
  std::uint64_t trips = 0;
  std::uint64_t grid_points = 0;

  PrepStats& operator+=(const PrepStats& o);
};

// At most one record per timestamp; among equal timestamps the earliest
// in input order survives. Input must be sorted ascending by timestamp.
std::vector<AisRecord> deduplicate(const std::vector<AisRecord>& records);

// Point n (n >= 1) carries speed/bearing computed from points n-1 and n;
// point 0 copies point 1's values (singleton: speed 0, bearing 0).
// Zero-displacement pairs get speed 0 and the previous bearing.
std::vector<KinematicPoint> annotate_kinematics(
    const std::vector<AisRecord>& records);

// Anchor scan: a point whose speed relative to the last retained point
// exceeds s_max (strictly) is dropped; survivors get their kinematics
// recomputed against the anchor.
std::vector<KinematicPoint> filter_speed_outliers(
    const std::vector<KinematicPoint>& points, const PrepConfig& cfg);

// Removes points with speed < s_min; each removal also closes the
// current segment, as does a temporal gap > gap_max or an antimeridian
// crossing. Segments shorter than length_min points are discarded.
std::vector<std::vector<KinematicPoint>> split_and_filter_stationary(
    const std::vector<KinematicPoint>& points, const PrepConfig& cfg,
    PrepStats* stats = nullptr);

// The id of the nearest POI when it lies within d_min (inclusive) of the
// trip's first point, otherwise nullopt.
std::optional<int> assign_origin(const std::vector<KinematicPoint>& trip_points,
                                 const PoiIndex& pois, const PrepConfig& cfg);

// Linear resampling onto the grid t0, t0+rate, ... (last grid time <=
// last raw timestamp), kinematics recomputed between grid points.
// Returns an empty vector when fewer than 2 grid points result.
std::vector<KinematicPoint> resample_trip(
    const std::vector<KinematicPoint>& trip_points, const PrepConfig& cfg);

// Full per-vessel pipeline: dedup -> kinematics -> outlier filter ->
// stationarity/segmentation -> POI origin -> resampling.
std::vector<Trip> prepare_vessel(const std::string& vessel_id,
                                 const std::vector<AisRecord>& records,
                                 const PrepConfig& cfg, const PoiIndex& pois,
                                 std::optional<int> vessel_type,
                                 PrepStats* stats = nullptr);

// Runs prepare_vessel over every vessel (concurrently; output order and
// content are independent of the worker count). vessel_types maps
// vessel_id -> type for vessels that have one.
std::vector<Trip> prepare_trips(
    const std::map<std::string, std::vector<AisRecord>>& by_vessel,
    const PrepConfig& cfg, const PoiIndex& pois,
    const std::map<std::string, int>& vessel_types,
    PrepStats* stats = nullptr);

// Trips file: one row per resampled point, grouped by trip, header
// "vessel_id,trip_id,vessel_type,origin_poi,timestamp,lon,lat,speed,bearing".
extern const char* const kTripsCsvHeader;
void write_trips_csv(std::ostream& out, const std::vector<Trip>& trips);
std::vector<Trip> read_trips_csv(std::istream& in);

// The uniform grid spacing of a trip set read back from a trips file.
// Throws ConfigError when trips disagree or any trip is non-uniform.
std::int64_t infer_rate_s(const std::vector<Trip>& trips);

}  // namespace flpxr
