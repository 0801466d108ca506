#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "flpxr/error.hpp"
#include "flpxr/features.hpp"
#include "flpxr/prep.hpp"
#include "support/synthetic.hpp"

using namespace flpxr;
using namespace flpxr::testsupport;

namespace {

// A hand-built trip on a uniform 90 s grid heading due east at the
// equator at `speed_kn`.
Trip make_equator_trip(int points, double speed_kn = 10.0,
                       std::int64_t t0 = 0) {
  Trip trip;
  trip.vessel_id = "T";
  trip.trip_id = 0;
  GeoPoint pos{0.0, 0.0};
  for (int i = 0; i < points; ++i) {
    trip.points.push_back(
        KinematicPoint{t0 + i * 90, pos, speed_kn, 90.0});
    pos = destination_point(pos, 90.0, speed_kn * kKnotMs * 90.0);
  }
  trip.start_pos = trip.points.front().pos;
  return trip;
}

}  // namespace

TEST_CASE("position_at: grid hit, interpolation, outside span") {
  const Trip trip = make_equator_trip(5);
  const auto exact = position_at(trip, 180);
  REQUIRE(exact.has_value());
  CHECK(exact->lon == trip.points[2].pos.lon);
  CHECK(exact->lat == trip.points[2].pos.lat);

  const auto mid = position_at(trip, 45);
  REQUIRE(mid.has_value());
  CHECK(mid->lon ==
        0.5 * (trip.points[0].pos.lon + trip.points[1].pos.lon));

  CHECK(!position_at(trip, 361).has_value());
  CHECK(!position_at(trip, -1).has_value());
  CHECK(position_at(trip, 360).has_value());  // inclusive end
}

TEST_CASE("extract_features fills the Table-I layout") {
  const Trip trip = [] {
    Trip t = make_equator_trip(20);
    t.vessel_type = 60;
    t.origin_poi = 3;
    return t;
  }();
  const CategoryEncoder enc({60}, {3});

  SUBCASE("extrapolation diff for 10 kt due east at 10 minutes") {
    const FeatureVector fv = extract_features(trip, 0, 10, enc);
    CHECK(fv[kFvType] == 0.0);
    CHECK(fv[kFLon] == 0.0);
    CHECK(fv[kFLat] == 0.0);
    CHECK(fv[kFSpeed] == 10.0);
    CHECK(fv[kFBearing] == 90.0);
    // 10 kt for 600 s is 3086.664 m east: 0.0277590... degrees at the
    // equator (independent closed form: degrees(d / R)).
    CHECK(fv[kFExtrapDiffLon] ==
          doctest::Approx(0.027759036254115327).epsilon(1e-9));
    CHECK(std::fabs(fv[kFExtrapDiffLat]) < 1e-12);
    CHECK(fv[kFDeltaT] == 10.0);
    CHECK(fv[kFOrigin] == 0.0);
  }

  SUBCASE("last_diff is missing before enough history exists") {
    const FeatureVector early = extract_features(trip, 3, 10, enc);
    CHECK(is_missing(early[kFLastDiffLon]));  // t_i - 600 < start
    CHECK(is_missing(early[kFLastDiffLat]));

    // Grid index 10 is 900 s in: 600 s of history is available.
    const FeatureVector late = extract_features(trip, 10, 10, enc);
    REQUIRE(!is_missing(late[kFLastDiffLon]));
    const auto past = position_at(trip, trip.points[10].timestamp - 600);
    REQUIRE(past.has_value());
    CHECK(late[kFLastDiffLon] == trip.points[10].pos.lon - past->lon);
  }

  SUBCASE("orig_dist is zero at the trip start and grows along it") {
    CHECK(extract_features(trip, 0, 10, enc)[kFOrigDist] == 0.0);
    const double d5 = extract_features(trip, 5, 10, enc)[kFOrigDist];
    const double d10 = extract_features(trip, 10, 10, enc)[kFOrigDist];
    CHECK(d5 > 0.0);
    CHECK(d10 > d5);
    CHECK(d5 == doctest::Approx(5 * 90 * 10.0 * kKnotMs).epsilon(1e-6));
  }

  SUBCASE("missing categorical inputs produce the sentinel") {
    Trip bare = make_equator_trip(5);
    const FeatureVector fv = extract_features(bare, 0, 10, enc);
    CHECK(is_missing(fv[kFvType]));
    CHECK(is_missing(fv[kFOrigin]));
  }

  SUBCASE("index out of range throws") {
    CHECK_THROWS_AS(extract_features(trip, 20, 10, enc), InvalidInput);
  }
}

TEST_CASE("category encoding is first-seen ordinal with missing fallback") {
  std::vector<Trip> trips(3);
  trips[0].vessel_type = 60;
  trips[1].vessel_type = 60;
  trips[2].vessel_type = 37;
  trips[0].origin_poi = 5;
  const CategoryEncoder enc = CategoryEncoder::fit(trips);

  CHECK(enc.encode_vessel_type(60) == 0.0);
  CHECK(enc.encode_vessel_type(37) == 1.0);
  CHECK(is_missing(enc.encode_vessel_type(99)));       // unseen
  CHECK(is_missing(enc.encode_vessel_type(std::nullopt)));
  CHECK(enc.encode_origin(5) == 0.0);
  CHECK(is_missing(enc.encode_origin(6)));
}

TEST_CASE("build_training_set enumerates eligible (point, horizon) pairs") {
  const CategoryEncoder enc;

  SUBCASE("a 3600 s trip at rate 90 yields 34 examples for dt=10") {
    const Trip trip = make_equator_trip(41);  // span 3600 s
    REQUIRE(trip.points.back().timestamp == 3600);
    HorizonSet h;
    h.minutes = {10};
    const auto examples = build_training_set({trip}, h, enc);

    // Independent count: grid times with t + 600 <= 3600.
    std::size_t expected = 0;
    for (std::int64_t t = 0; t <= 3600; t += 90) {
      if (t + 600 <= 3600) ++expected;
    }
    CHECK(expected == 34);
    CHECK(examples.size() == expected);
    for (const auto& ex : examples) {
      CHECK(ex.features[kFDeltaT] == 10.0);
      CHECK(ex.source_timestamp <= 3000);
    }
  }

  SUBCASE("trips shorter than the smallest horizon yield nothing") {
    const Trip trip = make_equator_trip(5);  // 360 s span
    HorizonSet h;
    h.minutes = {10};
    CHECK(build_training_set({trip}, h, enc).empty());
  }

  SUBCASE("targets reconstruct the interpolated future exactly") {
    const Trip trip = make_equator_trip(60);
    HorizonSet h;
    h.minutes = {10, 20};
    const auto examples = build_training_set({trip}, h, enc);
    REQUIRE(!examples.empty());
    for (const auto& ex : examples) {
      const int dt = static_cast<int>(ex.features[kFDeltaT]);
      const auto future =
          position_at(trip, ex.source_timestamp + std::int64_t{60} * dt);
      REQUIRE(future.has_value());
      CHECK(ex.features[kFLon] + ex.target_dlon == future->lon);  // exact
      CHECK(ex.features[kFLat] + ex.target_dlat == future->lat);
    }
  }

  SUBCASE("constant-velocity targets equal the extrapolation feature") {
    const Trip trip = make_equator_trip(60);
    HorizonSet h;
    const auto examples = build_training_set({trip}, h, enc);
    REQUIRE(!examples.empty());
    for (const auto& ex : examples) {
      CHECK(std::fabs(ex.target_dlon - ex.features[kFExtrapDiffLon]) < 1e-6);
      CHECK(std::fabs(ex.target_dlat - ex.features[kFExtrapDiffLat]) < 1e-6);
    }
  }
}

TEST_CASE("example counts shrink with the horizon and match count_examples") {
  FleetOptions opt;
  opt.vessels = 8;
  opt.seed = 31;
  opt.jitter_interval = true;
  opt.stop_probability = 0.02;
  const auto fleet = make_fleet(opt);
  const auto trips =
      prepare_trips(group_by_vessel(fleet.records), PrepConfig{}, PoiIndex{}, {});
  REQUIRE(!trips.empty());

  const HorizonSet horizons;
  const CategoryEncoder enc = CategoryEncoder::fit(trips);
  const auto examples = build_training_set(trips, horizons, enc);
  const auto counts = count_examples(trips, horizons);
  REQUIRE(counts.size() == horizons.minutes.size());

  std::uint64_t prev = counts[0].points;
  std::size_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int dt = horizons.minutes[i];
    std::size_t enumerated = 0;
    for (const auto& ex : examples) {
      if (ex.features[kFDeltaT] == static_cast<double>(dt)) ++enumerated;
    }
    CHECK(counts[i].points == enumerated);
    CHECK(counts[i].points <= prev);  // monotone non-increasing
    prev = counts[i].points;
    total += enumerated;
  }
  CHECK(total == examples.size());
}

TEST_CASE("examples CSV dump uses empty fields for missing values") {
  Trip trip = make_equator_trip(20);
  const CategoryEncoder enc;
  HorizonSet h;
  h.minutes = {10};
  const auto examples = build_training_set({trip}, h, enc);
  REQUIRE(!examples.empty());
  std::ostringstream out;
  write_examples_csv(out, examples);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "dlon,dlat,ts,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11");
  std::string first;
  std::getline(in, first);
  // v_type (f0) is missing on this trip: ",," straight after ts.
  CHECK(first.find(",,") != std::string::npos);
}

TEST_CASE("horizon sets must be ascending and positive") {
  HorizonSet h;
  h.minutes = {10, 10};
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.minutes = {0};
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.minutes = {};
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.minutes = {10, 20, 30, 40, 50, 60};
  CHECK_NOTHROW(h.validate());
}
