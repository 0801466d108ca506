#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "flpxr/ais.hpp"
#include "flpxr/error.hpp"
#include "flpxr/eval.hpp"
#include "flpxr/features.hpp"
#include "flpxr/gbdt.hpp"
#include "flpxr/geo.hpp"
#include "flpxr/prep.hpp"

namespace py = pybind11;
using namespace flpxr;

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return in;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "AIS trajectory preprocessing and future location prediction";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  // --- geodesy -------------------------------------------------------------
  py::class_<GeoPoint>(m, "GeoPoint")
      .def(py::init<double, double>(), py::arg("lon"), py::arg("lat"))
      .def_readwrite("lon", &GeoPoint::lon)
      .def_readwrite("lat", &GeoPoint::lat)
      .def("valid", &GeoPoint::valid)
      .def("__repr__", [](const GeoPoint& p) {
        std::ostringstream ss;
        ss << "GeoPoint(lon=" << p.lon << ", lat=" << p.lat << ")";
        return ss.str();
      });
  m.def("haversine_m", &haversine_m, py::arg("a"), py::arg("b"));
  m.def("initial_bearing_deg", &initial_bearing_deg, py::arg("a"), py::arg("b"));
  m.def("speed_knots", &speed_knots, py::arg("a"), py::arg("b"), py::arg("dt_s"));
  m.def("destination_point", &destination_point, py::arg("origin"),
        py::arg("bearing_deg"), py::arg("distance_m"));
  m.def("lerp_point", &lerp_point, py::arg("a"), py::arg("b"), py::arg("f"));

  // --- ingestion -----------------------------------------------------------
  py::class_<AisRecord>(m, "AisRecord")
      .def(py::init([](std::string vessel_id, std::int64_t timestamp,
                       double lon, double lat, std::optional<int> vessel_type) {
             AisRecord r;
             r.vessel_id = std::move(vessel_id);
             r.timestamp = timestamp;
             r.pos = GeoPoint{lon, lat};
             r.vessel_type = vessel_type;
             return r;
           }),
           py::arg("vessel_id"), py::arg("timestamp"), py::arg("lon"),
           py::arg("lat"), py::arg("vessel_type") = std::nullopt)
      .def_readwrite("vessel_id", &AisRecord::vessel_id)
      .def_readwrite("timestamp", &AisRecord::timestamp)
      .def_readwrite("pos", &AisRecord::pos)
      .def_readwrite("vessel_type", &AisRecord::vessel_type);

  py::class_<Poi>(m, "Poi")
      .def(py::init([](int poi_id, double lon, double lat, std::string name) {
             return Poi{poi_id, GeoPoint{lon, lat}, std::move(name)};
           }),
           py::arg("poi_id"), py::arg("lon"), py::arg("lat"),
           py::arg("name") = std::string())
      .def_readwrite("poi_id", &Poi::poi_id)
      .def_readwrite("pos", &Poi::pos)
      .def_readwrite("name", &Poi::name);

  py::class_<PoiIndex>(m, "PoiIndex")
      .def(py::init<>())
      .def(py::init<std::vector<Poi>>(), py::arg("pois"))
      .def("__len__", &PoiIndex::size)
      .def("nearest", &PoiIndex::nearest, py::arg("p"));

  py::class_<IngestStats>(m, "IngestStats")
      .def_readonly("rows_read", &IngestStats::rows_read)
      .def_readonly("rows_malformed", &IngestStats::rows_malformed)
      .def_readonly("rows_out_of_range", &IngestStats::rows_out_of_range)
      .def("rows_accepted", &IngestStats::rows_accepted);

  py::class_<ColumnMapping>(m, "ColumnMapping")
      .def(py::init<>())
      .def_readwrite("id_col", &ColumnMapping::id_col)
      .def_readwrite("ts_col", &ColumnMapping::ts_col)
      .def_readwrite("lon_col", &ColumnMapping::lon_col)
      .def_readwrite("lat_col", &ColumnMapping::lat_col)
      .def_readwrite("type_col", &ColumnMapping::type_col)
      .def_readwrite("ts_millis", &ColumnMapping::ts_millis);

  m.def(
      "load_ais_csv",
      [](const std::string& path, const ColumnMapping& mapping) {
        std::ifstream in = open_or_throw(path);
        std::vector<AisRecord> records;
        const IngestStats stats = parse_ais_csv(in, mapping, records);
        return py::make_tuple(std::move(records), stats);
      },
      py::arg("path"), py::arg("mapping") = ColumnMapping{},
      "Parse a raw AIS CSV into (records, stats)");
  m.def(
      "load_poi_csv",
      [](const std::string& path) {
        std::ifstream in = open_or_throw(path);
        return parse_poi_csv(in);
      },
      py::arg("path"));
  m.def(
      "load_vessel_types",
      [](const std::string& path) {
        std::ifstream in = open_or_throw(path);
        return parse_vessel_types(in);
      },
      py::arg("path"));
  m.def("group_by_vessel", &group_by_vessel, py::arg("records"));

  // --- preprocessing -------------------------------------------------------
  py::class_<PrepConfig>(m, "PrepConfig")
      .def(py::init<>())
      .def_readwrite("s_min_kn", &PrepConfig::s_min_kn)
      .def_readwrite("s_max_kn", &PrepConfig::s_max_kn)
      .def_readwrite("gap_max_s", &PrepConfig::gap_max_s)
      .def_readwrite("length_min", &PrepConfig::length_min)
      .def_readwrite("d_min_m", &PrepConfig::d_min_m)
      .def_readwrite("rate_s", &PrepConfig::rate_s)
      .def("validate", &PrepConfig::validate);

  py::class_<KinematicPoint>(m, "KinematicPoint")
      .def_readonly("timestamp", &KinematicPoint::timestamp)
      .def_readonly("pos", &KinematicPoint::pos)
      .def_readonly("speed_kn", &KinematicPoint::speed_kn)
      .def_readonly("bearing_deg", &KinematicPoint::bearing_deg);

  py::class_<Trip>(m, "Trip")
      .def_readonly("vessel_id", &Trip::vessel_id)
      .def_readonly("trip_id", &Trip::trip_id)
      .def_readonly("vessel_type", &Trip::vessel_type)
      .def_readonly("origin_poi", &Trip::origin_poi)
      .def_readonly("start_pos", &Trip::start_pos)
      .def_readonly("points", &Trip::points)
      .def("__len__", [](const Trip& t) { return t.points.size(); });

  py::class_<PrepStats>(m, "PrepStats")
      .def_readonly("records_in", &PrepStats::records_in)
      .def_readonly("duplicates_dropped", &PrepStats::duplicates_dropped)
      .def_readonly("outliers_dropped", &PrepStats::outliers_dropped)
      .def_readonly("stationary_dropped", &PrepStats::stationary_dropped)
      .def_readonly("short_trips_dropped", &PrepStats::short_trips_dropped)
      .def_readonly("trips", &PrepStats::trips)
      .def_readonly("grid_points", &PrepStats::grid_points);

  m.def(
      "prepare_trips",
      [](const std::map<std::string, std::vector<AisRecord>>& by_vessel,
         const PrepConfig& cfg, const PoiIndex& pois,
         const std::map<std::string, int>& vessel_types) {
        PrepStats stats;
        auto trips = prepare_trips(by_vessel, cfg, pois, vessel_types, &stats);
        return py::make_tuple(std::move(trips), stats);
      },
      py::arg("by_vessel"), py::arg("cfg") = PrepConfig{},
      py::arg("pois") = PoiIndex{},
      py::arg("vessel_types") = std::map<std::string, int>{},
      "Run the full cleaning/resampling pipeline; returns (trips, stats)");
  m.def(
      "write_trips_csv",
      [](const std::string& path, const std::vector<Trip>& trips) {
        std::ofstream out(path);
        if (!out) throw IoError("cannot open file: " + path);
        write_trips_csv(out, trips);
      },
      py::arg("path"), py::arg("trips"));
  m.def(
      "read_trips_csv",
      [](const std::string& path) {
        std::ifstream in = open_or_throw(path);
        return read_trips_csv(in);
      },
      py::arg("path"));

  // --- features ------------------------------------------------------------
  py::class_<HorizonSet>(m, "HorizonSet")
      .def(py::init<>())
      .def(py::init([](std::vector<int> minutes) {
             HorizonSet h;
             h.minutes = std::move(minutes);
             h.validate();
             return h;
           }),
           py::arg("minutes"))
      .def_readwrite("minutes", &HorizonSet::minutes);

  py::class_<CategoryEncoder>(m, "CategoryEncoder")
      .def(py::init<>())
      .def_static("fit", &CategoryEncoder::fit, py::arg("trips"))
      .def("encode_vessel_type", &CategoryEncoder::encode_vessel_type)
      .def("encode_origin", &CategoryEncoder::encode_origin);

  py::class_<TrainingExample>(m, "TrainingExample")
      .def_readonly("features", &TrainingExample::features)
      .def_readonly("target_dlon", &TrainingExample::target_dlon)
      .def_readonly("target_dlat", &TrainingExample::target_dlat)
      .def_readonly("source_timestamp", &TrainingExample::source_timestamp);

  m.attr("FEATURE_NAMES") = std::vector<std::string>(kFeatureNames.begin(),
                                                     kFeatureNames.end());
  m.def("position_at", &position_at, py::arg("trip"), py::arg("t"));
  m.def("extract_features", &extract_features, py::arg("trip"), py::arg("i"),
        py::arg("dt_min"), py::arg("encoder"));
  m.def("build_training_set", &build_training_set, py::arg("trips"),
        py::arg("horizons"), py::arg("encoder"));

  // --- model ---------------------------------------------------------------
  py::class_<GbdtParams>(m, "GbdtParams")
      .def(py::init<>())
      .def_readwrite("n_estimators", &GbdtParams::n_estimators)
      .def_readwrite("learning_rate", &GbdtParams::learning_rate)
      .def_readwrite("max_depth", &GbdtParams::max_depth)
      .def_readwrite("n_bins", &GbdtParams::n_bins)
      .def_readwrite("lambda_", &GbdtParams::lambda)
      .def_readwrite("gamma", &GbdtParams::gamma)
      .def_readwrite("min_child_weight", &GbdtParams::min_child_weight)
      .def("validate", &GbdtParams::validate);

  py::class_<TrainInfo>(m, "TrainInfo")
      .def_readonly("mse_lon", &TrainInfo::mse_lon)
      .def_readonly("mse_lat", &TrainInfo::mse_lat)
      .def_readonly("train_seconds", &TrainInfo::train_seconds);

  py::class_<GbdtModel>(m, "GbdtModel")
      .def_property_readonly("horizons",
                             [](const GbdtModel& m_) { return m_.horizons; })
      .def_property_readonly("rate_s",
                             [](const GbdtModel& m_) { return m_.rate_s; })
      .def_property_readonly(
          "n_trees", [](const GbdtModel& m_) { return m_.lon.trees.size(); });

  m.def(
      "fit",
      [](const std::vector<TrainingExample>& examples, const GbdtParams& params,
         const CategoryEncoder& encoder, std::int64_t rate_s,
         const HorizonSet& horizons) {
        TrainInfo info;
        GbdtModel model = fit(examples, params, encoder, rate_s, horizons, &info);
        return py::make_tuple(std::move(model), info);
      },
      py::arg("examples"), py::arg("params") = GbdtParams{},
      py::arg("encoder") = CategoryEncoder{}, py::arg("rate_s") = 90,
      py::arg("horizons") = HorizonSet{},
      "Train the two delta ensembles; returns (model, info)");
  m.def("predict_delta", &predict_delta, py::arg("model"), py::arg("features"));
  m.def(
      "predict_position",
      [](const GbdtModel& model, const FeatureVector& features) {
        return predict_position(model, features);
      },
      py::arg("model"), py::arg("features"));
  m.def("save_model", &save_model_file, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model_file, py::arg("path"));
  m.def("model_size_bytes", &model_size_bytes, py::arg("model"));

  // --- evaluation ----------------------------------------------------------
  py::class_<SplitConfig>(m, "SplitConfig")
      .def(py::init<>())
      .def_readwrite("train_fraction", &SplitConfig::train_fraction);

  py::class_<HorizonStat>(m, "HorizonStat")
      .def_readonly("horizon_min", &HorizonStat::horizon_min)
      .def_readonly("count", &HorizonStat::count)
      .def_readonly("mean_m", &HorizonStat::mean_m)
      .def_readonly("std_m", &HorizonStat::std_m);

  py::class_<HorizonReport>(m, "HorizonReport")
      .def_readonly("rows", &HorizonReport::rows);

  m.def("chronological_split", &chronological_split, py::arg("examples"),
        py::arg("cfg") = SplitConfig{});
  m.def("displacement_error_m", &displacement_error_m, py::arg("predicted"),
        py::arg("actual"));
  m.def("evaluate", &evaluate, py::arg("model"), py::arg("test"),
        py::arg("horizons"));
  m.def("persistence_baseline", &persistence_baseline, py::arg("test"),
        py::arg("horizons"));
}
