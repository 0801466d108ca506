#include "flpxr/ais.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"

namespace flpxr {

PoiIndex::PoiIndex(std::vector<Poi> pois) : pois_(std::move(pois)) {
  std::sort(pois_.begin(), pois_.end(),
            [](const Poi& a, const Poi& b) { return a.poi_id < b.poi_id; });
}

std::optional<Poi> PoiIndex::nearest(const GeoPoint& p) const {
  if (pois_.empty()) return std::nullopt;
  const Poi* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Poi& poi : pois_) {
    const double d = haversine_m(p, poi.pos);
    // Strictly-less keeps the lowest poi_id on ties (pois_ sorted by id).
    if (d < best_d) {
      best_d = d;
      best = &poi;
    }
  }
  return *best;
}

namespace {

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("column '" + name + "' not found in CSV header");
}

bool read_line(std::istream& in, std::string& line) {
  return static_cast<bool>(std::getline(in, line));
}

}  // namespace

IngestStats parse_ais_csv(std::istream& in, const ColumnMapping& mapping,
                          const std::function<void(AisRecord&&)>& on_record) {
  if (!in) throw IoError("AIS CSV source is not readable");

  std::string line;
  if (!read_line(in, line)) {
    if (in.bad()) throw IoError("failed to read AIS CSV header");
    throw ConfigError("AIS CSV is empty (header row required)");
  }

  std::vector<std::string> fields;
  csv::split_line(line, fields);
  const std::size_t id_idx = find_column(fields, mapping.id_col);
  const std::size_t ts_idx = find_column(fields, mapping.ts_col);
  const std::size_t lon_idx = find_column(fields, mapping.lon_col);
  const std::size_t lat_idx = find_column(fields, mapping.lat_col);
  std::size_t type_idx = std::numeric_limits<std::size_t>::max();
  const bool has_type = !mapping.type_col.empty();
  if (has_type) type_idx = find_column(fields, mapping.type_col);

  const std::size_t min_fields =
      std::max({id_idx, ts_idx, lon_idx, lat_idx,
                has_type ? type_idx : std::size_t{0}}) +
      1;

  IngestStats stats;
  while (read_line(in, line)) {
    if (line.empty()) continue;
    ++stats.rows_read;
    csv::split_line(line, fields);
    if (fields.size() < min_fields || fields[id_idx].empty()) {
      ++stats.rows_malformed;
      continue;
    }
    const auto ts = csv::parse_double(fields[ts_idx]);
    const auto lon = csv::parse_double(fields[lon_idx]);
    const auto lat = csv::parse_double(fields[lat_idx]);
    if (!ts || !lon || !lat || !std::isfinite(*ts)) {
      ++stats.rows_malformed;
      continue;
    }
    std::int64_t t = static_cast<std::int64_t>(*ts);
    if (mapping.ts_millis) t /= 1000;
    const GeoPoint pos{*lon, *lat};
    if (t < 0 || !pos.valid()) {
      ++stats.rows_out_of_range;
      continue;
    }
    AisRecord rec;
    rec.vessel_id = fields[id_idx];
    rec.timestamp = t;
    rec.pos = pos;
    if (has_type && !fields[type_idx].empty()) {
      if (auto vt = csv::parse_int(fields[type_idx])) {
        rec.vessel_type = static_cast<int>(*vt);
      }
    }
    on_record(std::move(rec));
  }
  if (in.bad()) throw IoError("I/O failure while reading AIS CSV");
  return stats;
}

IngestStats parse_ais_csv(std::istream& in, const ColumnMapping& mapping,
                          std::vector<AisRecord>& out) {
  return parse_ais_csv(in, mapping,
                       [&out](AisRecord&& r) { out.push_back(std::move(r)); });
}

PoiIndex parse_poi_csv(std::istream& in,
                       std::vector<std::string>* duplicate_warnings) {
  if (!in) throw IoError("POI CSV source is not readable");

  std::string line;
  if (!read_line(in, line)) {
    if (in.bad()) throw IoError("failed to read POI CSV header");
    return PoiIndex{};  // empty file -> empty index
  }
  std::vector<std::string> fields;
  csv::split_line(line, fields);
  const std::size_t id_idx = find_column(fields, "poi_id");
  const std::size_t lon_idx = find_column(fields, "lon");
  const std::size_t lat_idx = find_column(fields, "lat");
  std::size_t name_idx = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "name") name_idx = i;
  }

  std::map<int, Poi> by_id;
  while (read_line(in, line)) {
    if (line.empty()) continue;
    csv::split_line(line, fields);
    if (fields.size() <= std::max({id_idx, lon_idx, lat_idx})) continue;
    const auto id = csv::parse_int(fields[id_idx]);
    const auto lon = csv::parse_double(fields[lon_idx]);
    const auto lat = csv::parse_double(fields[lat_idx]);
    if (!id || !lon || !lat) continue;
    Poi poi;
    poi.poi_id = static_cast<int>(*id);
    poi.pos = GeoPoint{*lon, *lat};
    if (!poi.pos.valid()) continue;
    if (name_idx < fields.size()) poi.name = fields[name_idx];
    auto [it, inserted] = by_id.insert_or_assign(poi.poi_id, std::move(poi));
    if (!inserted && duplicate_warnings) {
      duplicate_warnings->push_back("duplicate poi_id " +
                                    std::to_string(it->first) +
                                    ": keeping the later row");
    }
  }
  if (in.bad()) throw IoError("I/O failure while reading POI CSV");

  std::vector<Poi> pois;
  pois.reserve(by_id.size());
  for (auto& [id, poi] : by_id) pois.push_back(std::move(poi));
  return PoiIndex{std::move(pois)};
}

std::map<std::string, int> parse_vessel_types(std::istream& in) {
  if (!in) throw IoError("vessel-type CSV source is not readable");

  std::string line;
  if (!read_line(in, line)) {
    if (in.bad()) throw IoError("failed to read vessel-type CSV header");
    return {};
  }
  std::vector<std::string> fields;
  csv::split_line(line, fields);
  const std::size_t id_idx = find_column(fields, "vessel_id");
  const std::size_t type_idx = find_column(fields, "vessel_type");

  std::map<std::string, int> types;
  while (read_line(in, line)) {
    if (line.empty()) continue;
    csv::split_line(line, fields);
    if (fields.size() <= std::max(id_idx, type_idx)) continue;
    const auto vt = csv::parse_int(fields[type_idx]);
    if (!vt || fields[id_idx].empty()) continue;
    types[fields[id_idx]] = static_cast<int>(*vt);
  }
  if (in.bad()) throw IoError("I/O failure while reading vessel-type CSV");
  return types;
}

std::map<std::string, std::vector<AisRecord>> group_by_vessel(
    std::vector<AisRecord> records) {
  std::map<std::string, std::vector<AisRecord>> grouped;
  for (auto& rec : records) {
    grouped[rec.vessel_id].push_back(std::move(rec));
  }
  for (auto& [id, list] : grouped) {
    std::stable_sort(list.begin(), list.end(),
                     [](const AisRecord& a, const AisRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  return grouped;
}

}  // namespace flpxr
