#include "flpxr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"
#include "flpxr/threading.hpp"

namespace flpxr {

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train_fraction must be in (0, 1)");
  }
}

std::pair<std::vector<TrainingExample>, std::vector<TrainingExample>>
chronological_split(std::vector<TrainingExample> examples,
                    const SplitConfig& cfg) {
  cfg.validate();
  if (examples.size() < 2) {
    throw InvalidInput("chronological_split: need at least 2 examples");
  }
  std::stable_sort(examples.begin(), examples.end(),
                   [](const TrainingExample& a, const TrainingExample& b) {
                     return a.source_timestamp < b.source_timestamp;
                   });
  // ceil(N * fraction); the tiny slack keeps decimal fractions like 0.8,
  // whose binary product overshoots N*f by one ulp, from rounding up an
  // exact boundary.
  const double n = static_cast<double>(examples.size());
  std::size_t train_n = static_cast<std::size_t>(
      std::ceil(n * cfg.train_fraction - 1e-9));
  train_n = std::min(train_n, examples.size());

  std::vector<TrainingExample> test(
      examples.begin() + static_cast<std::ptrdiff_t>(train_n), examples.end());
  examples.resize(train_n);
  return {std::move(examples), std::move(test)};
}

double displacement_error_m(const GeoPoint& predicted, const GeoPoint& actual) {
  return haversine_m(predicted, actual);
}

namespace {

HorizonStat stat_from_errors(int horizon, const std::vector<double>& errors) {
  HorizonStat s;
  s.horizon_min = horizon;
  s.count = errors.size();
  if (errors.empty()) {
    s.mean_m = std::numeric_limits<double>::quiet_NaN();
    s.std_m = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean_m = sum / static_cast<double>(errors.size());
  double sq = 0.0;
  for (double e : errors) {
    const double d = e - s.mean_m;
    sq += d * d;
  }
  s.std_m = std::sqrt(sq / static_cast<double>(errors.size()));
  return s;
}

template <typename PredictFn>
HorizonReport report_errors(const std::vector<TrainingExample>& test,
                            const HorizonSet& horizons, PredictFn&& predict) {
  horizons.validate();
  HorizonReport report;
  std::vector<double> errors;
  for (int h : horizons.minutes) {
    errors.clear();
    for (const TrainingExample& ex : test) {
      if (ex.features[kFDeltaT] != static_cast<double>(h)) continue;
      const GeoPoint actual{ex.features[kFLon] + ex.target_dlon,
                            ex.features[kFLat] + ex.target_dlat};
      errors.push_back(displacement_error_m(predict(ex), actual));
    }
    report.rows.push_back(stat_from_errors(h, errors));
  }
  return report;
}

}  // namespace

HorizonReport evaluate(const GbdtModel& model,
                       const std::vector<TrainingExample>& test,
                       const HorizonSet& horizons) {
  return report_errors(test, horizons, [&model](const TrainingExample& ex) {
    return predict_position(model, ex.features);
  });
}

HorizonReport persistence_baseline(const std::vector<TrainingExample>& test,
                                   const HorizonSet& horizons) {
  return report_errors(test, horizons, [](const TrainingExample& ex) {
    return GeoPoint{ex.features[kFLon], ex.features[kFLat]};
  });
}

void write_report_csv(std::ostream& out, const std::string& dataset,
                      const HorizonReport& report) {
  out << "dataset,horizon_min,count,mean_m,std_m\n";
  for (const HorizonStat& s : report.rows) {
    out << csv::quote_field(dataset) << ',' << s.horizon_min << ',' << s.count
        << ',';
    if (s.count > 0) out << csv::format_double(s.mean_m);
    out << ',';
    if (s.count > 0) out << csv::format_double(s.std_m);
    out << '\n';
  }
  if (!out) throw IoError("failed to write report CSV");
}

namespace {

GridRow run_grid_row(const std::map<std::string, std::vector<AisRecord>>* by_vessel,
                     const PoiIndex& pois,
                     const std::map<std::string, int>& vessel_types,
                     const GridSpec& spec, double value,
                     const std::vector<Trip>* base_trips) {
  GridRow row;
  row.axis = spec.axis;
  row.value = value;

  PrepConfig prep = spec.base_prep;
  GbdtParams params = spec.base_params;
  if (spec.axis == "rate") {
    prep.rate_s = static_cast<std::int64_t>(value);
  } else if (spec.axis == "learning_rate") {
    params.learning_rate = value;
  } else if (spec.axis == "max_depth") {
    params.max_depth = static_cast<int>(value);
  } else if (spec.axis == "n_estimators") {
    params.n_estimators = static_cast<int>(value);
  } else {
    throw ConfigError("grid: unknown axis '" + spec.axis + "'");
  }

  std::vector<Trip> reprepped;
  const std::vector<Trip>* trips = base_trips;
  if (spec.axis == "rate") {
    if (!by_vessel) {
      throw ConfigError("grid: the rate axis needs raw AIS input");
    }
    reprepped = prepare_trips(*by_vessel, prep, pois, vessel_types);
    trips = &reprepped;
  }

  const CategoryEncoder encoder = CategoryEncoder::fit(*trips);
  auto examples = build_training_set(*trips, spec.horizons, encoder);
  if (examples.size() < 2) {
    throw InsufficientDataError("grid: not enough examples");
  }
  auto [train, test] = chronological_split(std::move(examples), spec.split);
  if (train.empty() || test.empty()) {
    throw InsufficientDataError("grid: empty split");
  }

  TrainInfo info;
  const GbdtModel model =
      fit(train, params, encoder, prep.rate_s, spec.horizons, &info);
  row.model_size_bytes = model_size_bytes(model);

  if (spec.parallel_rows) {
    row.training_s = std::numeric_limits<double>::quiet_NaN();
    row.inference_us = std::numeric_limits<double>::quiet_NaN();
  } else {
    row.training_s = info.train_seconds;
    // Median of 3 timed passes over the test set.
    std::vector<double> reps;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      for (const TrainingExample& ex : test) {
        volatile double sink = predict_delta(model, ex.features).first;
        (void)sink;
      }
      const double us = std::chrono::duration<double, std::micro>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      reps.push_back(us / static_cast<double>(test.size()));
    }
    std::sort(reps.begin(), reps.end());
    row.inference_us = reps[reps.size() / 2];
  }

  const HorizonReport report = evaluate(model, test, spec.horizons);
  for (const HorizonStat& s : report.rows) row.mean_err_m.push_back(s.mean_m);
  return row;
}

void validate_grid_spec(const GridSpec& spec) {
  if (spec.values.empty()) throw ConfigError("grid: no candidate values");
  if (spec.axis != "rate" && spec.axis != "learning_rate" &&
      spec.axis != "max_depth" && spec.axis != "n_estimators") {
    throw ConfigError("grid: unknown axis '" + spec.axis + "'");
  }
  spec.horizons.validate();
  spec.split.validate();
  spec.base_prep.validate();
  spec.base_params.validate();
}

std::vector<GridRow> run_grid(
    const std::map<std::string, std::vector<AisRecord>>* by_vessel,
    const PoiIndex& pois, const std::map<std::string, int>& vessel_types,
    const std::vector<Trip>* base_trips, const GridSpec& spec) {
  std::vector<GridRow> rows(spec.values.size());
  auto run_one = [&](std::size_t i) {
    try {
      rows[i] = run_grid_row(by_vessel, pois, vessel_types, spec,
                             spec.values[i], base_trips);
    } catch (const Error& e) {
      rows[i].axis = spec.axis;
      rows[i].value = spec.values[i];
      rows[i].failed = true;
      rows[i].error = e.what();
    }
  };
  if (spec.parallel_rows) {
    parallel_for(spec.values.size(), run_one);
  } else {
    for (std::size_t i = 0; i < spec.values.size(); ++i) run_one(i);
  }
  return rows;
}

}  // namespace

std::vector<GridRow> grid_search(
    const std::map<std::string, std::vector<AisRecord>>& by_vessel,
    const PoiIndex& pois, const std::map<std::string, int>& vessel_types,
    const GridSpec& spec) {
  validate_grid_spec(spec);

  // Non-rate axes reuse one preprocessing pass at the base rate.
  std::vector<Trip> base_trips;
  if (spec.axis != "rate") {
    base_trips = prepare_trips(by_vessel, spec.base_prep, pois, vessel_types);
  }
  return run_grid(&by_vessel, pois, vessel_types, &base_trips, spec);
}

std::vector<GridRow> grid_search_trips(const std::vector<Trip>& trips,
                                       const GridSpec& spec) {
  validate_grid_spec(spec);
  if (spec.axis == "rate") {
    throw ConfigError("grid: the rate axis needs raw AIS input");
  }
  return run_grid(nullptr, PoiIndex{}, {}, &trips, spec);
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows,
                    const HorizonSet& horizons) {
  out << "axis,value,model_size_bytes,inference_us,training_s";
  for (int h : horizons.minutes) out << ",err" << h;
  out << '\n';
  for (const GridRow& row : rows) {
    out << row.axis << ',' << csv::format_double(row.value) << ',';
    if (!row.failed) {
      out << row.model_size_bytes << ',';
      if (!std::isnan(row.inference_us)) out << csv::format_double(row.inference_us);
      out << ',';
      if (!std::isnan(row.training_s)) out << csv::format_double(row.training_s);
      for (double err : row.mean_err_m) {
        out << ',';
        if (!std::isnan(err)) out << csv::format_double(err);
      }
      // Pad when some horizons had no examples at all.
      for (std::size_t i = row.mean_err_m.size(); i < horizons.minutes.size();
           ++i) {
        out << ',';
      }
    } else {
      for (std::size_t i = 0; i < 2 + horizons.minutes.size(); ++i) out << ',';
    }
    out << '\n';
  }
  if (!out) throw IoError("failed to write grid CSV");
}

}  // namespace flpxr
