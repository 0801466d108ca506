#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flpxr/geo.hpp"

namespace flpxr {

// One raw AIS position report.
struct AisRecord {
  std::string vessel_id;
  std::int64_t timestamp = 0;  // unix seconds
  GeoPoint pos;
  std::optional<int> vessel_type;
};

struct Poi {
  int poi_id = 0;
  GeoPoint pos;
  std::string name;
};

// Nearest-neighbor lookup over a small set of POIs. Brute force scan;
// ties broken by lowest poi_id.
class PoiIndex {
 public:
  PoiIndex() = default;
  explicit PoiIndex(std::vector<Poi> pois);

  std::size_t size() const { return pois_.size(); }
  bool empty() const { return pois_.empty(); }
  const std::vector<Poi>& pois() const { return pois_; }

  // nullopt only when the index is empty.
  std::optional<Poi> nearest(const GeoPoint& p) const;

 private:
  std::vector<Poi> pois_;  // sorted by poi_id
};

struct IngestStats {
  std::uint64_t rows_read = 0;  // data rows seen (header excluded)
  std::uint64_t rows_malformed = 0;
  std::uint64_t rows_out_of_range = 0;

  std::uint64_t rows_accepted() const {
    return rows_read - rows_malformed - rows_out_of_range;
  }
};

// Maps the caller's CSV header names onto AIS fields. Defaults match the
// Brest nari_dynamic schema. type_col is optional (empty = not mapped).
// When ts_millis is set, timestamps are divided by 1000 and truncated.
struct ColumnMapping {
  std::string id_col = "sourcemmsi";
  std::string ts_col = "t";
  std::string lon_col = "lon";
  std::string lat_col = "lat";
  std::string type_col;
  bool ts_millis = false;
};

// Streaming AIS CSV parser. Calls on_record for each valid row in file
// order; malformed and out-of-range rows are counted and skipped, never
// fatal. Throws ConfigError when a mapped column is missing from the
// header, IoError when the source cannot be read.
IngestStats parse_ais_csv(std::istream& in, const ColumnMapping& mapping,
                          const std::function<void(AisRecord&&)>& on_record);

// Convenience overload collecting records into a vector.
IngestStats parse_ais_csv(std::istream& in, const ColumnMapping& mapping,
                          std::vector<AisRecord>& out);

// POI CSV with header "poi_id,lon,lat,name" (name optional). Duplicate
// poi_id: last row wins; `duplicate_warnings` (when given) receives one
// message per duplicate. Invalid rows are skipped.
PoiIndex parse_poi_csv(std::istream& in,
                       std::vector<std::string>* duplicate_warnings = nullptr);

// Vessel-type CSV with header "vessel_id,vessel_type".
std::map<std::string, int> parse_vessel_types(std::istream& in);

// Partitions records by vessel and sorts each vessel's list ascending by
// timestamp (stable: ties keep input order). The map is ordered so
// iteration is deterministic.
std::map<std::string, std::vector<AisRecord>> group_by_vessel(
    std::vector<AisRecord> records);

}  // namespace flpxr
