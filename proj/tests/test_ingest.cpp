#include <doctest.h>

#include <random>
#include <sstream>

#include "flpxr/ais.hpp"
#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"

using namespace flpxr;

namespace {

ColumnMapping simple_mapping() {
  ColumnMapping m;
  m.id_col = "id";
  m.ts_col = "ts";
  m.lon_col = "lon";
  m.lat_col = "lat";
  return m;
}

}  // namespace

TEST_CASE("AIS rows map onto records; bad rows are counted, not fatal") {
  std::istringstream in(
      "id,ts,lon,lat\n"
      "244,1443650402,-4.47,48.38\n"
      "300,1443650403,-4.40,91\n"       // lat out of range
      "301,notanumber,-4.40,48.0\n"     // malformed timestamp
      "302,1443650404,-4.41,48.01\n");
  std::vector<AisRecord> records;
  const IngestStats stats = parse_ais_csv(in, simple_mapping(), records);

  CHECK(stats.rows_read == 4);
  CHECK(stats.rows_malformed == 1);
  CHECK(stats.rows_out_of_range == 1);
  CHECK(stats.rows_accepted() == 2);
  REQUIRE(records.size() == 2);
  CHECK(records[0].vessel_id == "244");
  CHECK(records[0].timestamp == 1443650402);
  CHECK(records[0].pos.lon == doctest::Approx(-4.47));
  CHECK(records[0].pos.lat == doctest::Approx(48.38));
  CHECK(!records[0].vessel_type.has_value());
}

TEST_CASE("missing mapped column is a configuration error") {
  std::istringstream in("id,ts,lon\n1,2,3\n");
  std::vector<AisRecord> out;
  CHECK_THROWS_AS(parse_ais_csv(in, simple_mapping(), out), ConfigError);
}

TEST_CASE("millisecond timestamps are divided and truncated") {
  std::istringstream in("id,ts,lon,lat\n9,1443650402999,1.0,2.0\n");
  ColumnMapping m = simple_mapping();
  m.ts_millis = true;
  std::vector<AisRecord> out;
  parse_ais_csv(in, m, out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].timestamp == 1443650402);
}

TEST_CASE("optional vessel-type column is picked up") {
  std::istringstream in("id,ts,lon,lat,shiptype\n9,100,1.0,2.0,60\n8,100,1,2,\n");
  ColumnMapping m = simple_mapping();
  m.type_col = "shiptype";
  std::vector<AisRecord> out;
  parse_ais_csv(in, m, out);
  REQUIRE(out.size() == 2);
  CHECK(out[0].vessel_type == 60);
  CHECK(!out[1].vessel_type.has_value());
}

TEST_CASE("accepted rows survive a serialize/reparse round trip") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> lon(-179, 179);
  std::uniform_real_distribution<double> lat(-89, 89);
  std::ostringstream src;
  src << "id,ts,lon,lat\n";
  for (int i = 0; i < 500; ++i) {
    src << (i % 7) << ',' << (1000 + i) << ',' << csv::format_double(lon(rng))
        << ',' << csv::format_double(lat(rng)) << '\n';
  }
  std::istringstream in(src.str());
  std::vector<AisRecord> first;
  const IngestStats s1 = parse_ais_csv(in, simple_mapping(), first);
  CHECK(s1.rows_accepted() == 500);

  std::ostringstream re;
  re << "id,ts,lon,lat\n";
  for (const auto& r : first) {
    re << r.vessel_id << ',' << r.timestamp << ','
       << csv::format_double(r.pos.lon) << ',' << csv::format_double(r.pos.lat)
       << '\n';
  }
  std::istringstream in2(re.str());
  std::vector<AisRecord> second;
  const IngestStats s2 = parse_ais_csv(in2, simple_mapping(), second);
  CHECK(s2.rows_accepted() == s1.rows_accepted());
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].vessel_id == first[i].vessel_id);
    CHECK(second[i].timestamp == first[i].timestamp);
    CHECK(second[i].pos.lon == first[i].pos.lon);  // exact round trip
    CHECK(second[i].pos.lat == first[i].pos.lat);
  }
}

TEST_CASE("POI CSV: size, duplicates keep the later row, empty body") {
  SUBCASE("single row") {
    std::istringstream in("poi_id,lon,lat,name\n1,23.63,37.94,Piraeus\n");
    const PoiIndex idx = parse_poi_csv(in);
    REQUIRE(idx.size() == 1);
    CHECK(idx.pois()[0].name == "Piraeus");
  }
  SUBCASE("empty body") {
    std::istringstream in("poi_id,lon,lat,name\n");
    CHECK(parse_poi_csv(in).size() == 0);
  }
  SUBCASE("duplicate poi_id keeps the later position") {
    std::istringstream in(
        "poi_id,lon,lat,name\n7,1.0,1.0,first\n7,2.0,2.0,second\n");
    std::vector<std::string> warnings;
    const PoiIndex idx = parse_poi_csv(in, &warnings);
    REQUIRE(idx.size() == 1);
    CHECK(idx.pois()[0].pos.lon == 2.0);
    CHECK(idx.pois()[0].name == "second");
    CHECK(warnings.size() == 1);
  }
}

TEST_CASE("nearest POI agrees with a brute-force scan, ties to lowest id") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> lon(-10, 10);
  std::uniform_real_distribution<double> lat(30, 50);
  std::vector<Poi> pois;
  for (int i = 0; i < 60; ++i) {
    pois.push_back(Poi{100 - i, GeoPoint{lon(rng), lat(rng)}, ""});
  }
  const PoiIndex idx(pois);

  for (int q = 0; q < 200; ++q) {
    const GeoPoint p{lon(rng), lat(rng)};
    // Independent scan in the original (unsorted) insertion order.
    int best_id = 0;
    double best_d = 1e300;
    for (const Poi& poi : pois) {
      const double d = haversine_m(p, poi.pos);
      if (d < best_d || (d == best_d && poi.poi_id < best_id)) {
        best_d = d;
        best_id = poi.poi_id;
      }
    }
    const auto got = idx.nearest(p);
    REQUIRE(got.has_value());
    CHECK(got->poi_id == best_id);
  }

  SUBCASE("exact tie prefers the lower id") {
    const PoiIndex tie(
        {Poi{9, GeoPoint{0.0, 1.0}, ""}, Poi{4, GeoPoint{0.0, -1.0}, ""}});
    const auto got = tie.nearest(GeoPoint{0.0, 0.0});
    REQUIRE(got.has_value());
    CHECK(got->poi_id == 4);
  }
  SUBCASE("empty index returns nothing") {
    CHECK(!PoiIndex{}.nearest(GeoPoint{0, 0}).has_value());
  }
}

TEST_CASE("vessel-type CSV parses into a map") {
  std::istringstream in("vessel_id,vessel_type\n244,60\n300,37\n");
  const auto types = parse_vessel_types(in);
  REQUIRE(types.size() == 2);
  CHECK(types.at("244") == 60);
  CHECK(types.at("300") == 37);
}

TEST_CASE("group_by_vessel partitions and stable-sorts by timestamp") {
  std::vector<AisRecord> records;
  auto add = [&](const char* id, std::int64_t ts, double lon) {
    records.push_back(AisRecord{id, ts, GeoPoint{lon, 0.0}, std::nullopt});
  };
  add("B", 5, 0.1);
  add("A", 3, 0.2);
  add("B", 2, 0.3);
  add("A", 3, 0.4);  // tied timestamp, later in input
  add("A", 1, 0.5);

  const auto grouped = group_by_vessel(records);
  REQUIRE(grouped.size() == 2);
  const auto& a = grouped.at("A");
  REQUIRE(a.size() == 3);
  CHECK(a[0].timestamp == 1);
  CHECK(a[1].timestamp == 3);
  CHECK(a[2].timestamp == 3);
  CHECK(a[1].pos.lon == 0.2);  // input order preserved within the tie
  CHECK(a[2].pos.lon == 0.4);
  const auto& b = grouped.at("B");
  REQUIRE(b.size() == 2);
  CHECK(b[0].timestamp == 2);

  // Permutation property: total count conserved.
  CHECK(a.size() + b.size() == records.size());
}

TEST_CASE("single record groups into a singleton list") {
  std::vector<AisRecord> records{AisRecord{"X", 9, GeoPoint{1, 1}, std::nullopt}};
  const auto grouped = group_by_vessel(records);
  REQUIRE(grouped.size() == 1);
  CHECK(grouped.at("X").size() == 1);
}
