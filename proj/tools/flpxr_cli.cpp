// flpxr: AIS trajectory preprocessing, position-prediction model
// training, prediction, evaluation and benchmarking in one binary.
//
// Exit codes: 0 success, 2 configuration, 3 I/O, 4 insufficient data,
// 5 model/schema.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flpxr/ais.hpp"
#include "flpxr/bench.hpp"
#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"
#include "flpxr/eval.hpp"
#include "flpxr/features.hpp"
#include "flpxr/gbdt.hpp"
#include "flpxr/prep.hpp"

namespace {

using namespace flpxr;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInsufficientData = 4;
constexpr int kExitModel = 5;

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct PrepFlags {
  PrepConfig cfg;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--rate", cfg.rate_s, "Resampling rate in seconds")
        ->capture_default_str();
    cmd->add_option("--smin", cfg.s_min_kn, "Stationarity threshold (knots)")
        ->capture_default_str();
    cmd->add_option("--smax", cfg.s_max_kn, "Speed outlier threshold (knots)")
        ->capture_default_str();
    cmd->add_option("--gap", cfg.gap_max_s, "Trip-splitting gap (seconds)")
        ->capture_default_str();
    cmd->add_option("--minlen", cfg.length_min, "Minimum points per trip")
        ->capture_default_str();
    cmd->add_option("--dmin", cfg.d_min_m, "POI origin radius (meters)")
        ->capture_default_str();
  }
};

struct ColumnFlags {
  ColumnMapping mapping;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--col-id", mapping.id_col, "Vessel id column name")
        ->capture_default_str();
    cmd->add_option("--col-ts", mapping.ts_col, "Timestamp column name")
        ->capture_default_str();
    cmd->add_option("--col-lon", mapping.lon_col, "Longitude column name")
        ->capture_default_str();
    cmd->add_option("--col-lat", mapping.lat_col, "Latitude column name")
        ->capture_default_str();
    cmd->add_option("--col-type", mapping.type_col,
                    "Vessel type column name (optional)");
    cmd->add_flag("--ts-millis", mapping.ts_millis,
                  "Timestamps are in milliseconds");
  }
};

struct GbdtFlags {
  GbdtParams params;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--depth", params.max_depth, "Maximum tree depth")
        ->capture_default_str();
    cmd->add_option("--lr", params.learning_rate, "Learning rate")
        ->capture_default_str();
    cmd->add_option("--rounds", params.n_estimators, "Boosting rounds")
        ->capture_default_str();
    cmd->add_option("--bins", params.n_bins, "Histogram bins per feature")
        ->capture_default_str();
    cmd->add_option("--lambda", params.lambda, "L2 leaf regularizer")
        ->capture_default_str();
  }
};

HorizonSet parse_horizons(const std::string& csv_list) {
  HorizonSet h;
  if (csv_list.empty()) return h;
  h.minutes.clear();
  std::vector<std::string> parts;
  csv::split_line(csv_list, parts);
  for (const auto& p : parts) {
    const auto v = csv::parse_int(p);
    if (!v) throw ConfigError("bad horizon value '" + p + "'");
    h.minutes.push_back(static_cast<int>(*v));
  }
  h.validate();
  return h;
}

// Removes a partially written output file unless commit() was reached.
class OutputGuard {
 public:
  explicit OutputGuard(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    file_.open(path_);
    if (!file_) throw IoError("cannot open output file: " + path_);
  }
  ~OutputGuard() {
    if (!path_.empty() && !committed_) {
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void commit() {
    if (!path_.empty()) {
      file_.flush();
      if (!file_) throw IoError("failed writing output file: " + path_);
    }
    committed_ = true;
  }

 private:
  std::string path_;
  std::ofstream file_;
  bool committed_ = false;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file: " + path);
  return in;
}

std::string dataset_name(const std::string& path) {
  const auto stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? "dataset" : stem;
}

bool is_trips_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> fields;
  csv::split_line(header, fields);
  return std::find(fields.begin(), fields.end(), "trip_id") != fields.end();
}

struct LoadedInputs {
  PoiIndex pois;
  std::map<std::string, int> vessel_types;
};

LoadedInputs load_side_inputs(const std::string& pois_path,
                              const std::string& types_path) {
  LoadedInputs side;
  if (!pois_path.empty()) {
    std::ifstream in = open_input(pois_path);
    std::vector<std::string> warnings;
    side.pois = parse_poi_csv(in, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  }
  if (!types_path.empty()) {
    std::ifstream in = open_input(types_path);
    side.vessel_types = parse_vessel_types(in);
  }
  return side;
}

struct PreprocessResult {
  std::vector<Trip> trips;
  IngestStats ingest;
  PrepStats prep;
};

PreprocessResult preprocess_raw(const std::string& input,
                                const ColumnMapping& mapping,
                                const PrepConfig& cfg,
                                const LoadedInputs& side) {
  PreprocessResult result;
  std::ifstream in = open_input(input);
  std::vector<AisRecord> records;
  result.ingest = parse_ais_csv(in, mapping, records);
  auto grouped = group_by_vessel(std::move(records));
  result.trips =
      prepare_trips(grouped, cfg, side.pois, side.vessel_types, &result.prep);
  return result;
}

// Reads either a trips file or a raw AIS file (preprocessed on the fly).
std::vector<Trip> load_trips(const std::string& input,
                             const ColumnMapping& mapping,
                             const PrepConfig& cfg, const LoadedInputs& side) {
  if (is_trips_file(input)) {
    std::ifstream in = open_input(input);
    return read_trips_csv(in);
  }
  return preprocess_raw(input, mapping, cfg, side).trips;
}

void verify_feature_schema(const GbdtModel& model) {
  if (model.feature_names.size() != kFeatureCount) {
    throw SchemaError("model has " +
                      std::to_string(model.feature_names.size()) +
                      " features; this build expects " +
                      std::to_string(kFeatureCount));
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    if (model.feature_names[static_cast<std::size_t>(i)] != kFeatureNames[static_cast<std::size_t>(i)]) {
      throw SchemaError("model feature order mismatch at index " +
                        std::to_string(i));
    }
  }
}

void print_prep_summary(const IngestStats& ingest, const PrepStats& prep,
                        const std::vector<Trip>& trips,
                        const HorizonSet& horizons) {
  std::cerr << "rows read: " << ingest.rows_read
            << " (malformed: " << ingest.rows_malformed
            << ", out of range: " << ingest.rows_out_of_range << ")\n";
  std::cerr << "dropped: " << prep.duplicates_dropped << " duplicates, "
            << prep.outliers_dropped << " speed outliers, "
            << prep.stationary_dropped << " stationary points, "
            << prep.short_trip_points_dropped << " points in "
            << prep.short_trips_dropped << " short trips, "
            << prep.degenerate_trip_points_dropped << " points in "
            << prep.degenerate_trips_dropped << " sub-rate trips\n";
  std::cerr << "trips: " << prep.trips << " (" << prep.grid_points
            << " resampled points from " << prep.raw_points_in_trips
            << " raw points)\n";
  if (trips.empty()) {
    std::cerr << "warning: no trips survived preprocessing\n";
    return;
  }
  std::cerr << "horizon_min vessels trips points\n";
  for (const HorizonCounts& c : count_examples(trips, horizons)) {
    std::cerr << c.horizon_min << ' ' << c.vessels << ' ' << c.trips << ' '
              << c.points << '\n';
  }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_preprocess(const std::string& input, const std::string& out,
                   const std::string& pois_path, const std::string& types_path,
                   const ColumnMapping& mapping, const PrepConfig& cfg,
                   const HorizonSet& horizons) {
  cfg.validate();
  horizons.validate();
  const LoadedInputs side = load_side_inputs(pois_path, types_path);
  const PreprocessResult result = preprocess_raw(input, mapping, cfg, side);

  OutputGuard guard(out);
  write_trips_csv(guard.stream(), result.trips);
  guard.commit();
  print_prep_summary(result.ingest, result.prep, result.trips, horizons);
  return kExitOk;
}

int cmd_train(const std::string& input, const std::string& out,
              const GbdtParams& params, const HorizonSet& horizons,
              const std::string& dump_examples) {
  params.validate();
  horizons.validate();
  std::ifstream in = open_input(input);
  const auto trips = read_trips_csv(in);
  if (trips.empty()) throw InsufficientDataError("no trips in input");
  const std::int64_t rate = infer_rate_s(trips);

  const CategoryEncoder encoder = CategoryEncoder::fit(trips);
  const auto examples = build_training_set(trips, horizons, encoder);
  if (examples.empty()) {
    throw InsufficientDataError("training set is empty for the horizons given");
  }
  if (!dump_examples.empty()) {
    OutputGuard dump(dump_examples);
    write_examples_csv(dump.stream(), examples);
    dump.commit();
  }

  TrainInfo info;
  const GbdtModel model = fit(examples, params, encoder, rate, horizons, &info);
  if (params.n_estimators == 0) {
    std::cerr << "warning: 0 boosting rounds; the model predicts the mean "
                 "delta for every input\n";
  }
  save_model_file(model, out);
  std::cerr << "examples: " << examples.size() << '\n';
  std::cerr << "training seconds: " << info.train_seconds << '\n';
  std::cerr << "model bytes: " << model_size_bytes(model) << '\n';
  return kExitOk;
}

int cmd_predict(const std::string& input, const std::string& out,
                const std::string& model_path, const std::string& horizons_arg,
                const ColumnMapping& mapping, const PrepConfig& cfg,
                const std::string& pois_path, const std::string& types_path) {
  const GbdtModel model = load_model_file(model_path);
  verify_feature_schema(model);
  HorizonSet horizons;
  horizons.minutes = model.horizons;
  if (!horizons_arg.empty()) horizons = parse_horizons(horizons_arg);
  horizons.validate();

  const LoadedInputs side = load_side_inputs(pois_path, types_path);
  const auto trips = load_trips(input, mapping, cfg, side);

  OutputGuard guard(out);
  std::ostream& os = guard.stream();
  os << "vessel_id,timestamp,horizon_min,pred_lon,pred_lat\n";
  PredictStats stats;
  for (const Trip& trip : trips) {
    const std::string vid = csv::quote_field(trip.vessel_id);
    for (std::size_t i = 0; i < trip.points.size(); ++i) {
      for (int h : horizons.minutes) {
        const FeatureVector fv = extract_features(trip, i, h, model.encoder);
        const GeoPoint pred = predict_position(model, fv, &stats);
        os << vid << ',' << trip.points[i].timestamp << ',' << h << ','
           << csv::format_double(pred.lon) << ','
           << csv::format_double(pred.lat) << '\n';
      }
    }
  }
  guard.commit();
  if (stats.clamped > 0) {
    std::cerr << "warning: " << stats.clamped
              << " predictions clamped to valid coordinate ranges\n";
  }
  return kExitOk;
}

// Evaluation of a predictions file against the trips that produced it.
HorizonReport evaluate_predictions_file(const std::string& predictions_path,
                                        const std::vector<Trip>& trips,
                                        HorizonSet& horizons_out) {
  // Index trips by vessel for the (vessel, timestamp) join.
  std::map<std::string, std::vector<const Trip*>> by_vessel;
  for (const Trip& t : trips) by_vessel[t.vessel_id].push_back(&t);

  std::ifstream in = open_input(predictions_path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty predictions file");
  {
    std::vector<std::string> header;
    csv::split_line(line, header);
    const std::vector<std::string> expected{"vessel_id", "timestamp",
                                            "horizon_min", "pred_lon",
                                            "pred_lat"};
    if (header != expected) {
      throw ConfigError("predictions CSV header mismatch");
    }
  }

  std::map<int, std::vector<double>> errors_by_horizon;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    csv::split_line(line, fields);
    if (fields.size() != 5) throw ConfigError("bad predictions row");
    const auto ts = csv::parse_int(fields[1]);
    const auto h = csv::parse_int(fields[2]);
    const auto plon = csv::parse_double(fields[3]);
    const auto plat = csv::parse_double(fields[4]);
    if (!ts || !h || !plon || !plat) throw ConfigError("bad predictions row");

    const auto it = by_vessel.find(fields[0]);
    if (it == by_vessel.end()) continue;
    for (const Trip* trip : it->second) {
      if (trip->points.empty() || trip->points.front().timestamp > *ts ||
          trip->points.back().timestamp < *ts) {
        continue;
      }
      const auto future = position_at(*trip, *ts + 60 * *h);
      if (!future) break;  // point exists but horizon leaves the trip
      // Reconstruct the actual position exactly as the in-memory
      // evaluation does: current + (future - current).
      const auto current = position_at(*trip, *ts);
      if (!current) break;
      const GeoPoint actual{current->lon + (future->lon - current->lon),
                            current->lat + (future->lat - current->lat)};
      errors_by_horizon[static_cast<int>(*h)].push_back(
          displacement_error_m(GeoPoint{*plon, *plat}, actual));
      break;
    }
  }

  HorizonReport report;
  horizons_out.minutes.clear();
  for (const auto& [h, errors] : errors_by_horizon) {
    horizons_out.minutes.push_back(h);
    HorizonStat s;
    s.horizon_min = h;
    s.count = errors.size();
    double sum = 0.0;
    for (double e : errors) sum += e;
    s.mean_m = sum / static_cast<double>(errors.size());
    double sq = 0.0;
    for (double e : errors) sq += (e - s.mean_m) * (e - s.mean_m);
    s.std_m = std::sqrt(sq / static_cast<double>(errors.size()));
    report.rows.push_back(s);
  }
  return report;
}

int cmd_evaluate(const std::string& input, const std::string& out,
                 const std::string& model_path,
                 const std::string& predictions_path,
                 const std::string& horizons_arg, double train_fraction,
                 const GbdtParams& params, const ColumnMapping& mapping,
                 const PrepConfig& cfg, const std::string& pois_path,
                 const std::string& types_path) {
  SplitConfig split;
  split.train_fraction = train_fraction;
  split.validate();
  params.validate();

  const LoadedInputs side = load_side_inputs(pois_path, types_path);
  const auto trips = load_trips(input, mapping, cfg, side);
  if (trips.empty()) throw InsufficientDataError("no trips in input");

  HorizonReport report;
  HorizonSet horizons;
  if (!predictions_path.empty()) {
    // Oracle mode: score an existing predictions file.
    report = evaluate_predictions_file(predictions_path, trips, horizons);
    if (report.rows.empty()) {
      throw InsufficientDataError("no predictions matched the trips");
    }
  } else if (!model_path.empty()) {
    // Held-out mode: evaluate a trained model on this whole file.
    const GbdtModel model = load_model_file(model_path);
    verify_feature_schema(model);
    horizons.minutes = model.horizons;
    if (!horizons_arg.empty()) horizons = parse_horizons(horizons_arg);
    const auto examples = build_training_set(trips, horizons, model.encoder);
    if (examples.empty()) throw InsufficientDataError("no test examples");
    report = evaluate(model, examples, horizons);
  } else {
    // One-shot mode: chronological split, train, evaluate.
    horizons = parse_horizons(horizons_arg);
    const CategoryEncoder encoder = CategoryEncoder::fit(trips);
    auto examples = build_training_set(trips, horizons, encoder);
    if (examples.size() < 2) throw InsufficientDataError("no examples");
    auto [train, test] = chronological_split(std::move(examples), split);
    if (test.empty()) throw InsufficientDataError("empty test set");
    std::cerr << "split: " << train.size() << " train / " << test.size()
              << " test (" << train_fraction * 100 << "%/"
              << (1.0 - train_fraction) * 100 << "%)\n";
    const std::int64_t rate = infer_rate_s(trips);
    TrainInfo info;
    const GbdtModel model = fit(train, params, encoder, rate, horizons, &info);
    std::cerr << "training seconds: " << info.train_seconds << '\n';
    report = evaluate(model, test, horizons);
  }

  OutputGuard guard(out);
  write_report_csv(guard.stream(), dataset_name(input), report);
  guard.commit();
  return kExitOk;
}

int cmd_bench(const std::string& input, const std::string& out,
              const std::string& model_path, const std::string& batch_sizes,
              const ColumnMapping& mapping, const PrepConfig& cfg,
              const std::string& pois_path, const std::string& types_path) {
  cfg.validate();
  BenchConfig bench_cfg;
  if (!batch_sizes.empty()) {
    bench_cfg.batch_sizes.clear();
    std::vector<std::string> parts;
    csv::split_line(batch_sizes, parts);
    for (const auto& p : parts) {
      const auto v = csv::parse_int(p);
      if (!v || *v <= 0) throw ConfigError("bad batch size '" + p + "'");
      bench_cfg.batch_sizes.push_back(static_cast<std::size_t>(*v));
    }
  }

  const GbdtModel model = load_model_file(model_path);
  verify_feature_schema(model);
  const LoadedInputs side = load_side_inputs(pois_path, types_path);

  std::ifstream in = open_input(input);
  std::vector<AisRecord> records;
  parse_ais_csv(in, mapping, records);

  const auto rows =
      run_bench(records, model, cfg, side.pois, side.vessel_types, bench_cfg);
  OutputGuard guard(out);
  write_bench_csv(guard.stream(), rows);
  guard.commit();
  return kExitOk;
}

int cmd_grid(const std::string& input, const std::string& out,
             const std::string& axis_arg, const std::string& values_arg,
             const std::string& horizons_arg, double train_fraction,
             bool parallel, const GbdtParams& params,
             const ColumnMapping& mapping, const PrepConfig& cfg,
             const std::string& pois_path, const std::string& types_path) {
  GridSpec spec;
  spec.base_prep = cfg;
  spec.base_params = params;
  spec.horizons = parse_horizons(horizons_arg);
  spec.split.train_fraction = train_fraction;
  spec.parallel_rows = parallel;

  // Accept the short CLI spellings alongside the canonical axis names.
  if (axis_arg == "rate") {
    spec.axis = "rate";
    spec.values = {30, 60, 90, 120, 150};
  } else if (axis_arg == "depth" || axis_arg == "max_depth") {
    spec.axis = "max_depth";
    spec.values = {6, 9, 12, 15, 18};
  } else if (axis_arg == "lr" || axis_arg == "learning_rate") {
    spec.axis = "learning_rate";
    spec.values = {0.001, 0.005, 0.01, 0.05, 0.1};
  } else if (axis_arg == "rounds" || axis_arg == "n_estimators") {
    spec.axis = "n_estimators";
    spec.values = {500, 625, 750, 875, 1000};
  } else {
    throw ConfigError("unknown grid axis '" + axis_arg + "'");
  }
  if (!values_arg.empty()) {
    spec.values.clear();
    std::vector<std::string> parts;
    csv::split_line(values_arg, parts);
    for (const auto& p : parts) {
      const auto v = csv::parse_double(p);
      if (!v) throw ConfigError("bad grid value '" + p + "'");
      spec.values.push_back(*v);
    }
  }

  std::vector<GridRow> rows;
  if (is_trips_file(input)) {
    std::ifstream in = open_input(input);
    const auto trips = read_trips_csv(in);
    rows = grid_search_trips(trips, spec);
  } else {
    const LoadedInputs side = load_side_inputs(pois_path, types_path);
    std::ifstream in = open_input(input);
    std::vector<AisRecord> records;
    parse_ais_csv(in, mapping, records);
    const auto grouped = group_by_vessel(std::move(records));
    rows = grid_search(grouped, side.pois, side.vessel_types, spec);
  }
  for (const GridRow& row : rows) {
    if (row.failed) {
      std::cerr << "warning: " << row.axis << "=" << row.value
                << " failed: " << row.error << '\n';
    }
  }
  OutputGuard guard(out);
  write_grid_csv(guard.stream(), rows, spec.horizons);
  guard.commit();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vessel trajectory cleaning and future location prediction"};
  app.require_subcommand(1);

  std::string input, out, model_path, pois_path, types_path;
  std::string horizons_arg, values_arg, axis_arg, batch_sizes, predictions_path;
  std::string dump_examples;
  double train_fraction = 0.8;
  bool grid_parallel = false;
  PrepFlags prep;
  ColumnFlags cols;
  GbdtFlags gbdt;

  auto* p_pre = app.add_subcommand("preprocess",
                                   "Clean raw AIS data into resampled trips");
  p_pre->add_option("--input", input, "Raw AIS CSV")->required();
  p_pre->add_option("--out", out, "Trips CSV output path")->required();
  p_pre->add_option("--pois", pois_path, "POI CSV (poi_id,lon,lat,name)");
  p_pre->add_option("--vessel-types", types_path,
                    "Vessel type CSV (vessel_id,vessel_type)");
  p_pre->add_option("--horizons", horizons_arg,
                    "Horizons in minutes for the summary statistics");
  prep.add_to(p_pre);
  cols.add_to(p_pre);

  auto* p_train = app.add_subcommand("train", "Train a prediction model");
  p_train->add_option("--input", input, "Trips CSV")->required();
  p_train->add_option("--out", out, "Model output path")->required();
  p_train->add_option("--horizons", horizons_arg, "Horizons in minutes");
  p_train->add_option("--dump-examples", dump_examples,
                      "Also write the training matrix CSV here");
  gbdt.add_to(p_train);

  auto* p_pred = app.add_subcommand("predict", "Predict future positions");
  p_pred->add_option("--input", input, "Trips CSV or raw AIS CSV")->required();
  p_pred->add_option("--model", model_path, "Model file")->required();
  p_pred->add_option("--out", out, "Predictions CSV (stdout when omitted)");
  p_pred->add_option("--horizons", horizons_arg,
                     "Horizons in minutes (default: the model's)");
  p_pred->add_option("--pois", pois_path, "POI CSV (raw input only)");
  p_pred->add_option("--vessel-types", types_path,
                     "Vessel type CSV (raw input only)");
  prep.add_to(p_pred);
  cols.add_to(p_pred);

  auto* p_eval = app.add_subcommand(
      "evaluate", "Report per-horizon displacement errors");
  p_eval->add_option("--input", input, "Trips CSV or raw AIS CSV")->required();
  p_eval->add_option("--out", out, "Report CSV (stdout when omitted)");
  p_eval->add_option("--model", model_path,
                     "Evaluate this model on the whole input");
  p_eval->add_option("--predictions", predictions_path,
                     "Score an existing predictions CSV against the input");
  p_eval->add_option("--horizons", horizons_arg, "Horizons in minutes");
  p_eval->add_option("--train-fraction", train_fraction,
                     "Chronological train fraction (one-shot mode)")
      ->capture_default_str();
  p_eval->add_option("--pois", pois_path, "POI CSV (raw input only)");
  p_eval->add_option("--vessel-types", types_path,
                     "Vessel type CSV (raw input only)");
  gbdt.add_to(p_eval);
  prep.add_to(p_eval);
  cols.add_to(p_eval);

  auto* p_bench = app.add_subcommand(
      "bench", "Per-record preprocessing/inference latency and throughput");
  p_bench->add_option("--input", input, "Raw AIS CSV")->required();
  p_bench->add_option("--model", model_path, "Model file")->required();
  p_bench->add_option("--out", out, "Bench CSV (stdout when omitted)");
  p_bench->add_option("--batch-sizes", batch_sizes,
                      "Comma-separated batch sizes (default 10000,100000)");
  p_bench->add_option("--pois", pois_path, "POI CSV");
  p_bench->add_option("--vessel-types", types_path, "Vessel type CSV");
  prep.add_to(p_bench);
  cols.add_to(p_bench);

  auto* p_grid = app.add_subcommand(
      "grid", "One-axis hyperparameter sweep around the base model");
  p_grid->add_option("--input", input, "Raw AIS CSV (or trips CSV)")
      ->required();
  p_grid->add_option("--axis", axis_arg, "rate | depth | lr | rounds")
      ->required();
  p_grid->add_option("--values", values_arg,
                     "Comma-separated candidates (default: standard sets)");
  p_grid->add_option("--out", out, "Grid CSV (stdout when omitted)");
  p_grid->add_option("--horizons", horizons_arg, "Horizons in minutes");
  p_grid->add_option("--train-fraction", train_fraction,
                     "Chronological train fraction")
      ->capture_default_str();
  p_grid->add_flag("--parallel", grid_parallel,
                   "Run rows concurrently (disables timing columns)");
  p_grid->add_option("--pois", pois_path, "POI CSV");
  p_grid->add_option("--vessel-types", types_path, "Vessel type CSV");
  gbdt.add_to(p_grid);
  prep.add_to(p_grid);
  cols.add_to(p_grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (p_pre->parsed()) {
      return cmd_preprocess(input, out, pois_path, types_path, cols.mapping,
                            prep.cfg, parse_horizons(horizons_arg));
    }
    if (p_train->parsed()) {
      return cmd_train(input, out, gbdt.params, parse_horizons(horizons_arg),
                       dump_examples);
    }
    if (p_pred->parsed()) {
      return cmd_predict(input, out, model_path, horizons_arg, cols.mapping,
                         prep.cfg, pois_path, types_path);
    }
    if (p_eval->parsed()) {
      return cmd_evaluate(input, out, model_path, predictions_path,
                          horizons_arg, train_fraction, gbdt.params,
                          cols.mapping, prep.cfg, pois_path, types_path);
    }
    if (p_bench->parsed()) {
      return cmd_bench(input, out, model_path, batch_sizes, cols.mapping,
                       prep.cfg, pois_path, types_path);
    }
    if (p_grid->parsed()) {
      return cmd_grid(input, out, axis_arg, values_arg, horizons_arg,
                      train_fraction, grid_parallel, gbdt.params, cols.mapping,
                      prep.cfg, pois_path, types_path);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInsufficientData;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
