#include "flpxr/features.hpp"

#include <algorithm>
#include <set>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"

namespace flpxr {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "v_type",        "lon",           "lat",
    "sp",            "br",            "extrap_diff_lon",
    "extrap_diff_lat", "last_diff_lon", "last_diff_lat",
    "origin",        "orig_dist",     "delta_t",
};

void HorizonSet::validate() const {
  if (minutes.empty()) throw ConfigError("horizons: at least one required");
  for (std::size_t i = 0; i < minutes.size(); ++i) {
    if (minutes[i] <= 0) throw ConfigError("horizons: must be positive");
    if (i > 0 && minutes[i] <= minutes[i - 1]) {
      throw ConfigError("horizons: must be strictly ascending");
    }
  }
}

CategoryEncoder::CategoryEncoder(std::vector<int> vessel_type_vocab,
                                 std::vector<int> origin_vocab)
    : vtype_vocab_(std::move(vessel_type_vocab)),
      origin_vocab_(std::move(origin_vocab)) {}

CategoryEncoder CategoryEncoder::fit(const std::vector<Trip>& trips) {
  CategoryEncoder enc;
  for (const Trip& trip : trips) {
    if (trip.vessel_type &&
        std::find(enc.vtype_vocab_.begin(), enc.vtype_vocab_.end(),
                  *trip.vessel_type) == enc.vtype_vocab_.end()) {
      enc.vtype_vocab_.push_back(*trip.vessel_type);
    }
    if (trip.origin_poi &&
        std::find(enc.origin_vocab_.begin(), enc.origin_vocab_.end(),
                  *trip.origin_poi) == enc.origin_vocab_.end()) {
      enc.origin_vocab_.push_back(*trip.origin_poi);
    }
  }
  return enc;
}

namespace {

double encode_with(const std::vector<int>& vocab, std::optional<int> raw) {
  if (!raw) return kMissingValue;
  const auto it = std::find(vocab.begin(), vocab.end(), *raw);
  if (it == vocab.end()) return kMissingValue;
  return static_cast<double>(it - vocab.begin());
}

}  // namespace

double CategoryEncoder::encode_vessel_type(std::optional<int> raw) const {
  return encode_with(vtype_vocab_, raw);
}

double CategoryEncoder::encode_origin(std::optional<int> raw) const {
  return encode_with(origin_vocab_, raw);
}

std::optional<GeoPoint> position_at(const Trip& trip, std::int64_t t) {
  if (trip.points.size() < 2) return std::nullopt;
  const std::int64_t t0 = trip.points.front().timestamp;
  const std::int64_t t_last = trip.points.back().timestamp;
  if (t < t0 || t > t_last) return std::nullopt;
  const std::int64_t rate = trip.points[1].timestamp - t0;
  const std::int64_t offset = t - t0;
  const std::int64_t k = offset / rate;
  const std::int64_t rem = offset % rate;
  if (rem == 0) return trip.points[static_cast<std::size_t>(k)].pos;
  const GeoPoint& a = trip.points[static_cast<std::size_t>(k)].pos;
  const GeoPoint& b = trip.points[static_cast<std::size_t>(k) + 1].pos;
  return lerp_point(a, b, static_cast<double>(rem) / static_cast<double>(rate));
}

FeatureVector extract_features(const Trip& trip, std::size_t i, int dt_min,
                               const CategoryEncoder& encoder) {
  if (i >= trip.points.size()) {
    throw InvalidInput("extract_features: grid index out of range");
  }
  const KinematicPoint& p = trip.points[i];
  FeatureVector fv{};
  fv[kFvType] = encoder.encode_vessel_type(trip.vessel_type);
  fv[kFLon] = p.pos.lon;
  fv[kFLat] = p.pos.lat;
  fv[kFSpeed] = p.speed_kn;
  fv[kFBearing] = p.bearing_deg;

  const double extrap_m = p.speed_kn * kKnotMs * dt_min * 60.0;
  const GeoPoint extrap = destination_point(p.pos, p.bearing_deg, extrap_m);
  fv[kFExtrapDiffLon] = extrap.lon - p.pos.lon;
  fv[kFExtrapDiffLat] = extrap.lat - p.pos.lat;

  const std::int64_t t_past = p.timestamp - std::int64_t{60} * dt_min;
  if (const auto past = position_at(trip, t_past)) {
    fv[kFLastDiffLon] = p.pos.lon - past->lon;
    fv[kFLastDiffLat] = p.pos.lat - past->lat;
  } else {
    fv[kFLastDiffLon] = kMissingValue;
    fv[kFLastDiffLat] = kMissingValue;
  }

  fv[kFOrigin] = encoder.encode_origin(trip.origin_poi);
  fv[kFOrigDist] = haversine_m(p.pos, trip.start_pos);
  fv[kFDeltaT] = static_cast<double>(dt_min);
  return fv;
}

std::vector<TrainingExample> build_training_set(const std::vector<Trip>& trips,
                                                const HorizonSet& horizons,
                                                const CategoryEncoder& encoder) {
  horizons.validate();
  std::vector<TrainingExample> examples;
  for (const Trip& trip : trips) {
    for (std::size_t i = 0; i < trip.points.size(); ++i) {
      const std::int64_t t_i = trip.points[i].timestamp;
      for (int dt : horizons.minutes) {
        const auto future = position_at(trip, t_i + std::int64_t{60} * dt);
        if (!future) continue;
        TrainingExample ex;
        ex.features = extract_features(trip, i, dt, encoder);
        ex.target_dlon = future->lon - trip.points[i].pos.lon;
        ex.target_dlat = future->lat - trip.points[i].pos.lat;
        ex.source_timestamp = t_i;
        examples.push_back(std::move(ex));
      }
    }
  }
  return examples;
}

std::vector<HorizonCounts> count_examples(const std::vector<Trip>& trips,
                                          const HorizonSet& horizons) {
  horizons.validate();
  std::vector<HorizonCounts> counts;
  for (int dt : horizons.minutes) {
    HorizonCounts c;
    c.horizon_min = dt;
    std::set<std::string> vessels;
    for (const Trip& trip : trips) {
      if (trip.points.size() < 2) continue;
      // Eligible sources: t_i + 60*dt still inside the trip.
      const std::int64_t span = trip.points.back().timestamp -
                                trip.points.front().timestamp;
      const std::int64_t rate = trip.points[1].timestamp -
                                trip.points[0].timestamp;
      const std::int64_t usable = span - std::int64_t{60} * dt;
      if (usable < 0) continue;
      c.points += static_cast<std::uint64_t>(usable / rate) + 1;
      ++c.trips;
      vessels.insert(trip.vessel_id);
    }
    c.vessels = vessels.size();
    counts.push_back(c);
  }
  return counts;
}

void write_examples_csv(std::ostream& out,
                        const std::vector<TrainingExample>& examples) {
  out << "dlon,dlat,ts";
  for (int f = 0; f < kFeatureCount; ++f) out << ",f" << f;
  out << '\n';
  for (const TrainingExample& ex : examples) {
    out << csv::format_double(ex.target_dlon) << ','
        << csv::format_double(ex.target_dlat) << ',' << ex.source_timestamp;
    for (int f = 0; f < kFeatureCount; ++f) {
      out << ',';
      if (!is_missing(ex.features[static_cast<std::size_t>(f)])) {
        out << csv::format_double(ex.features[static_cast<std::size_t>(f)]);
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("failed to write examples CSV");
}

}  // namespace flpxr
