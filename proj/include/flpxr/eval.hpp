#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "flpxr/ais.hpp"
#include "flpxr/features.hpp"
#include "flpxr/gbdt.hpp"
#include "flpxr/prep.hpp"

namespace flpxr {

struct SplitConfig {
  double train_fraction = 0.8;
  void validate() const;
};

// Stable sort by source timestamp; the first ceil(N * train_fraction)
// examples become the training set. Throws on fewer than 2 examples.
std::pair<std::vector<TrainingExample>, std::vector<TrainingExample>>
chronological_split(std::vector<TrainingExample> examples,
                    const SplitConfig& cfg);

// Haversine distance between predicted and actual positions.
double displacement_error_m(const GeoPoint& predicted, const GeoPoint& actual);

struct HorizonStat {
  int horizon_min = 0;
  std::uint64_t count = 0;
  double mean_m = 0.0;  // NaN when count == 0
  double std_m = 0.0;   // population standard deviation; NaN when count == 0
};

struct HorizonReport {
  std::vector<HorizonStat> rows;  // one per horizon, ascending
};

// Groups test examples by their delta_t feature and reports mean and
// population standard deviation of the displacement errors.
HorizonReport evaluate(const GbdtModel& model,
                       const std::vector<TrainingExample>& test,
                       const HorizonSet& horizons);

// The predict-no-movement reference: future position = current position.
HorizonReport persistence_baseline(const std::vector<TrainingExample>& test,
                                   const HorizonSet& horizons);

// Report CSV, header "dataset,horizon_min,count,mean_m,std_m".
void write_report_csv(std::ostream& out, const std::string& dataset,
                      const HorizonReport& report);

// One-axis hyperparameter sweep around a fixed base configuration.
// Canonical axis names: rate, learning_rate, max_depth, n_estimators.
struct GridSpec {
  std::string axis;
  std::vector<double> values;
  PrepConfig base_prep;
  GbdtParams base_params;
  HorizonSet horizons;
  SplitConfig split;
  bool parallel_rows = false;  // disables the timing columns
};

struct GridRow {
  std::string axis;
  double value = 0.0;
  bool failed = false;
  std::string error;
  std::uint64_t model_size_bytes = 0;
  double inference_us = 0.0;  // per record, median of 3; NaN when untimed
  double training_s = 0.0;    // NaN when untimed
  std::vector<double> mean_err_m;  // one per horizon
};

// Re-runs preprocessing per candidate when axis == rate, otherwise
// preprocesses once at the base rate and sweeps the training knob. A
// failed row is reported, not fatal.
std::vector<GridRow> grid_search(
    const std::map<std::string, std::vector<AisRecord>>& by_vessel,
    const PoiIndex& pois, const std::map<std::string, int>& vessel_types,
    const GridSpec& spec);

// Sweep over already-preprocessed trips; the rate axis is not available
// here since it needs the raw records.
std::vector<GridRow> grid_search_trips(const std::vector<Trip>& trips,
                                       const GridSpec& spec);

// Grid CSV, header "axis,value,model_size_bytes,inference_us,training_s,
// err<h1>,...,err<hk>" for the horizons in the spec.
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows,
                    const HorizonSet& horizons);

}  // namespace flpxr
