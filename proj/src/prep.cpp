#include "flpxr/prep.hpp"

#include <algorithm>
#include <cmath>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"
#include "flpxr/threading.hpp"

namespace flpxr {

void PrepConfig::validate() const {
  if (!(s_min_kn >= 0.0) || !(s_min_kn < s_max_kn)) {
    throw ConfigError("prep: require 0 <= s_min < s_max");
  }
  if (!(rate_s > 0) || !(gap_max_s > rate_s)) {
    throw ConfigError("prep: require gap_max > rate > 0");
  }
  if (length_min < 2) throw ConfigError("prep: require length_min >= 2");
  if (!(d_min_m > 0.0)) throw ConfigError("prep: require d_min > 0");
}

PrepStats& PrepStats::operator+=(const PrepStats& o) {
  records_in += o.records_in;
  duplicates_dropped += o.duplicates_dropped;
  outliers_dropped += o.outliers_dropped;
  stationary_dropped += o.stationary_dropped;
  short_trip_points_dropped += o.short_trip_points_dropped;
  degenerate_trip_points_dropped += o.degenerate_trip_points_dropped;
  raw_points_in_trips += o.raw_points_in_trips;
  short_trips_dropped += o.short_trips_dropped;
  degenerate_trips_dropped += o.degenerate_trips_dropped;
  trips += o.trips;
  grid_points += o.grid_points;
  return *this;
}

std::vector<AisRecord> deduplicate(const std::vector<AisRecord>& records) {
  std::vector<AisRecord> out;
  out.reserve(records.size());
  for (const AisRecord& rec : records) {
    if (!out.empty() && out.back().timestamp == rec.timestamp) continue;
    out.push_back(rec);
  }
  return out;
}

namespace {

// Shared kinematics convention: point n >= 1 from points n-1 and n
// (zero displacement: speed 0, previous bearing carried forward); point
// 0 copies point 1.
void recompute_kinematics(std::vector<KinematicPoint>& pts) {
  if (pts.empty()) return;
  if (pts.size() == 1) {
    pts[0].speed_kn = 0.0;
    pts[0].bearing_deg = 0.0;
    return;
  }
  double prev_bearing = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const KinematicPoint& prev = pts[i - 1];
    KinematicPoint& cur = pts[i];
    const double dt = static_cast<double>(cur.timestamp - prev.timestamp);
    if (cur.pos == prev.pos) {
      cur.speed_kn = 0.0;
      cur.bearing_deg = prev_bearing;
    } else {
      cur.speed_kn = speed_knots(prev.pos, cur.pos, dt);
      cur.bearing_deg = initial_bearing_deg(prev.pos, cur.pos);
    }
    prev_bearing = cur.bearing_deg;
  }
  pts[0].speed_kn = pts[1].speed_kn;
  pts[0].bearing_deg = pts[1].bearing_deg;
}

}  // namespace

std::vector<KinematicPoint> annotate_kinematics(
    const std::vector<AisRecord>& records) {
  std::vector<KinematicPoint> pts;
  pts.reserve(records.size());
  for (const AisRecord& rec : records) {
    pts.push_back(KinematicPoint{rec.timestamp, rec.pos, 0.0, 0.0});
  }
  recompute_kinematics(pts);
  return pts;
}

std::vector<KinematicPoint> filter_speed_outliers(
    const std::vector<KinematicPoint>& points, const PrepConfig& cfg) {
  if (points.size() <= 1) return points;
  std::vector<KinematicPoint> kept;
  kept.reserve(points.size());
  kept.push_back(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const KinematicPoint& anchor = kept.back();
    const KinematicPoint& cand = points[i];
    const double dt = static_cast<double>(cand.timestamp - anchor.timestamp);
    const double sp =
        cand.pos == anchor.pos ? 0.0 : speed_knots(anchor.pos, cand.pos, dt);
    if (sp > cfg.s_max_kn) continue;
    kept.push_back(cand);
  }
  recompute_kinematics(kept);
  return kept;
}

std::vector<std::vector<KinematicPoint>> split_and_filter_stationary(
    const std::vector<KinematicPoint>& points, const PrepConfig& cfg,
    PrepStats* stats) {
  std::vector<std::vector<KinematicPoint>> trips;
  std::vector<KinematicPoint> cur;

  auto close_segment = [&] {
    if (cur.empty()) return;
    if (cur.size() >= static_cast<std::size_t>(cfg.length_min)) {
      trips.push_back(std::move(cur));
    } else if (stats) {
      ++stats->short_trips_dropped;
      stats->short_trip_points_dropped += cur.size();
    }
    cur.clear();
  };

  for (const KinematicPoint& p : points) {
    if (p.speed_kn < cfg.s_min_kn) {
      // Stationary points are both removed and act as trip boundaries.
      if (stats) ++stats->stationary_dropped;
      close_segment();
      continue;
    }
    if (!cur.empty()) {
      const bool gap = p.timestamp - cur.back().timestamp > cfg.gap_max_s;
      // Trips crossing the antimeridian are not supported; split there.
      const bool crossing = std::fabs(p.pos.lon - cur.back().pos.lon) > 180.0;
      if (gap || crossing) close_segment();
    }
    cur.push_back(p);
  }
  close_segment();
  return trips;
}

std::optional<int> assign_origin(const std::vector<KinematicPoint>& trip_points,
                                 const PoiIndex& pois, const PrepConfig& cfg) {
  if (trip_points.empty()) return std::nullopt;
  const auto nearest = pois.nearest(trip_points.front().pos);
  if (!nearest) return std::nullopt;
  if (haversine_m(trip_points.front().pos, nearest->pos) <= cfg.d_min_m) {
    return nearest->poi_id;
  }
  return std::nullopt;
}

std::vector<KinematicPoint> resample_trip(
    const std::vector<KinematicPoint>& trip_points, const PrepConfig& cfg) {
  if (trip_points.size() < 2) return {};
  const std::int64_t t0 = trip_points.front().timestamp;
  const std::int64_t span = trip_points.back().timestamp - t0;
  const std::int64_t n_grid = span / cfg.rate_s + 1;
  if (n_grid < 2) return {};

  std::vector<KinematicPoint> grid;
  grid.reserve(static_cast<std::size_t>(n_grid));
  std::size_t j = 0;  // raw segment cursor: ts[j] <= t <= ts[j+1]
  for (std::int64_t k = 0; k < n_grid; ++k) {
    const std::int64_t t = t0 + k * cfg.rate_s;
    while (j + 2 < trip_points.size() && trip_points[j + 1].timestamp <= t) ++j;
    const KinematicPoint& a = trip_points[j];
    const KinematicPoint& b = trip_points[j + 1];
    GeoPoint pos;
    if (t == a.timestamp) {
      pos = a.pos;
    } else if (t == b.timestamp) {
      pos = b.pos;
    } else {
      const double f = static_cast<double>(t - a.timestamp) /
                       static_cast<double>(b.timestamp - a.timestamp);
      pos = lerp_point(a.pos, b.pos, f);
    }
    grid.push_back(KinematicPoint{t, pos, 0.0, 0.0});
  }
  recompute_kinematics(grid);
  return grid;
}

std::vector<Trip> prepare_vessel(const std::string& vessel_id,
                                 const std::vector<AisRecord>& records,
                                 const PrepConfig& cfg, const PoiIndex& pois,
                                 std::optional<int> vessel_type,
                                 PrepStats* stats) {
  PrepStats local;
  local.records_in = records.size();

  const auto deduped = deduplicate(records);
  local.duplicates_dropped = records.size() - deduped.size();

  auto annotated = annotate_kinematics(deduped);
  auto filtered = filter_speed_outliers(annotated, cfg);
  local.outliers_dropped = annotated.size() - filtered.size();

  auto raw_trips = split_and_filter_stationary(filtered, cfg, &local);

  std::vector<Trip> trips;
  int trip_id = 0;
  for (const auto& raw : raw_trips) {
    auto grid = resample_trip(raw, cfg);
    if (grid.size() < 2) {
      ++local.degenerate_trips_dropped;
      local.degenerate_trip_points_dropped += raw.size();
      continue;
    }
    local.raw_points_in_trips += raw.size();
    local.grid_points += grid.size();
    ++local.trips;
    Trip trip;
    trip.vessel_id = vessel_id;
    trip.trip_id = trip_id++;
    trip.vessel_type = vessel_type;
    trip.origin_poi = assign_origin(raw, pois, cfg);
    trip.start_pos = raw.front().pos;
    trip.points = std::move(grid);
    trips.push_back(std::move(trip));
  }
  if (stats) *stats += local;
  return trips;
}

std::vector<Trip> prepare_trips(
    const std::map<std::string, std::vector<AisRecord>>& by_vessel,
    const PrepConfig& cfg, const PoiIndex& pois,
    const std::map<std::string, int>& vessel_types, PrepStats* stats) {
  cfg.validate();

  std::vector<const std::pair<const std::string, std::vector<AisRecord>>*> slots;
  slots.reserve(by_vessel.size());
  for (const auto& kv : by_vessel) slots.push_back(&kv);

  std::vector<std::vector<Trip>> results(slots.size());
  std::vector<PrepStats> stat_slots(slots.size());
  parallel_for(slots.size(), [&](std::size_t i) {
    const auto& [vessel_id, records] = *slots[i];
    std::optional<int> vtype;
    if (auto it = vessel_types.find(vessel_id); it != vessel_types.end()) {
      vtype = it->second;
    }
    results[i] =
        prepare_vessel(vessel_id, records, cfg, pois, vtype, &stat_slots[i]);
  });

  std::vector<Trip> trips;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (stats) *stats += stat_slots[i];
    for (auto& t : results[i]) trips.push_back(std::move(t));
  }
  return trips;
}

const char* const kTripsCsvHeader =
    "vessel_id,trip_id,vessel_type,origin_poi,timestamp,lon,lat,speed,bearing";

void write_trips_csv(std::ostream& out, const std::vector<Trip>& trips) {
  out << kTripsCsvHeader << '\n';
  for (const Trip& trip : trips) {
    const std::string vid = csv::quote_field(trip.vessel_id);
    const std::string vtype =
        trip.vessel_type ? std::to_string(*trip.vessel_type) : std::string();
    const std::string origin =
        trip.origin_poi ? std::to_string(*trip.origin_poi) : std::string();
    for (const KinematicPoint& p : trip.points) {
      out << vid << ',' << trip.trip_id << ',' << vtype << ',' << origin << ','
          << p.timestamp << ',' << csv::format_double(p.pos.lon) << ','
          << csv::format_double(p.pos.lat) << ','
          << csv::format_double(p.speed_kn) << ','
          << csv::format_double(p.bearing_deg) << '\n';
    }
  }
  if (!out) throw IoError("failed to write trips CSV");
}

std::vector<Trip> read_trips_csv(std::istream& in) {
  if (!in) throw IoError("trips CSV source is not readable");
  std::string line;
  if (!std::getline(in, line)) throw IoError("trips CSV is empty");
  {
    std::vector<std::string> header;
    csv::split_line(line, header);
    std::vector<std::string> expected;
    csv::split_line(kTripsCsvHeader, expected);
    if (header != expected) {
      throw ConfigError("trips CSV header mismatch; expected '" +
                        std::string(kTripsCsvHeader) + "'");
    }
  }

  std::vector<Trip> trips;
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    csv::split_line(line, fields);
    if (fields.size() != 9) {
      throw ConfigError("trips CSV line " + std::to_string(line_no) +
                        ": expected 9 fields");
    }
    const auto trip_id = csv::parse_int(fields[1]);
    const auto ts = csv::parse_int(fields[4]);
    const auto lon = csv::parse_double(fields[5]);
    const auto lat = csv::parse_double(fields[6]);
    const auto speed = csv::parse_double(fields[7]);
    const auto bearing = csv::parse_double(fields[8]);
    if (!trip_id || !ts || !lon || !lat || !speed || !bearing) {
      throw ConfigError("trips CSV line " + std::to_string(line_no) +
                        ": unparsable field");
    }
    const bool new_trip = trips.empty() ||
                          trips.back().vessel_id != fields[0] ||
                          trips.back().trip_id != *trip_id;
    if (new_trip) {
      Trip trip;
      trip.vessel_id = fields[0];
      trip.trip_id = static_cast<int>(*trip_id);
      if (!fields[2].empty()) {
        if (auto vt = csv::parse_int(fields[2])) {
          trip.vessel_type = static_cast<int>(*vt);
        }
      }
      if (!fields[3].empty()) {
        if (auto op = csv::parse_int(fields[3])) {
          trip.origin_poi = static_cast<int>(*op);
        }
      }
      trip.start_pos = GeoPoint{*lon, *lat};
      trips.push_back(std::move(trip));
    }
    trips.back().points.push_back(
        KinematicPoint{*ts, GeoPoint{*lon, *lat}, *speed, *bearing});
  }
  if (in.bad()) throw IoError("I/O failure while reading trips CSV");
  return trips;
}

std::int64_t infer_rate_s(const std::vector<Trip>& trips) {
  std::int64_t rate = 0;
  for (const Trip& trip : trips) {
    for (std::size_t i = 1; i < trip.points.size(); ++i) {
      const std::int64_t dt =
          trip.points[i].timestamp - trip.points[i - 1].timestamp;
      if (rate == 0) {
        rate = dt;
      } else if (dt != rate) {
        throw ConfigError("trips file has non-uniform grid spacing");
      }
    }
  }
  if (rate <= 0) throw ConfigError("cannot infer sampling rate from trips");
  return rate;
}

}  // namespace flpxr
