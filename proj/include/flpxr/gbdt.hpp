#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flpxr/features.hpp"
#include "flpxr/geo.hpp"

namespace flpxr {

struct GbdtParams {
  int n_estimators = 750;
  double learning_rate = 0.01;
  int max_depth = 12;
  int n_bins = 256;
  double lambda = 1.0;       // L2 leaf regularizer
  double gamma = 0.0;        // split-gain penalty
  double min_child_weight = 1.0;

  void validate() const;
};

// Dense numeric matrix, row-major; NaN marks a missing value.
struct DataMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

DataMatrix to_matrix(const std::vector<TrainingExample>& examples);

// Per-feature split thresholds in raw feature units, strictly ascending,
// at most n_bins - 1 per feature. Missing values occupy a dedicated bin.
struct BinSchema {
  std::vector<std::vector<double>> thresholds;  // one list per feature
};

// Thresholds at evenly spaced quantiles of the non-missing values; when
// a feature has <= n_bins distinct values, one threshold between each
// adjacent pair (binning is lossless there). Throws on an empty matrix.
BinSchema build_bins(const DataMatrix& m, int n_bins);

struct TreeNode {
  bool is_leaf = true;
  std::int32_t feature = -1;
  double threshold = 0.0;
  bool default_left = true;  // where missing values go
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf weight (unscaled; learning_rate applies)
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

// One boosted ensemble over a single target.
struct Ensemble {
  double base_score = 0.0;
  std::vector<Tree> trees;
};

// Gradient-boosted regression trees with squared-error loss, grown
// depth-wise over histogram bins. Deterministic for fixed params and
// input order (gain ties: lowest feature, lowest threshold, missing-left
// first); the result is independent of the worker count.
Ensemble fit_ensemble(const DataMatrix& x, std::span<const double> y,
                      const GbdtParams& params,
                      std::vector<double>* mse_per_round = nullptr);

// Sum of leaf values along each tree's path, scaled by learning_rate,
// plus the base score. Missing features follow default_left.
double predict_ensemble(const Ensemble& ensemble, double learning_rate,
                        std::span<const double> features);

struct GbdtModel {
  GbdtParams params;
  Ensemble lon;  // predicts delta-lon in degrees
  Ensemble lat;  // predicts delta-lat in degrees
  std::vector<std::string> feature_names;  // frozen order descriptor
  CategoryEncoder encoder;
  std::int64_t rate_s = 0;   // preprocessing fingerprint
  std::vector<int> horizons; // minutes
};

struct TrainInfo {
  std::vector<double> mse_lon;  // per-round training MSE
  std::vector<double> mse_lat;
  double train_seconds = 0.0;
};

// Trains the two per-coordinate ensembles on the Table-I feature matrix.
GbdtModel fit(const std::vector<TrainingExample>& examples,
              const GbdtParams& params, const CategoryEncoder& encoder,
              std::int64_t rate_s, const HorizonSet& horizons,
              TrainInfo* info = nullptr);

// (delta-lon, delta-lat) in degrees. Throws SchemaError when the feature
// count does not match the model descriptor.
std::pair<double, double> predict_delta(const GbdtModel& model,
                                        std::span<const double> features);

struct PredictStats {
  std::uint64_t clamped = 0;  // predictions clamped into valid ranges
};

// Most recent position plus the predicted delta, clamped to valid
// coordinate ranges (counted in stats, never an error).
GeoPoint predict_position(const GbdtModel& model,
                          std::span<const double> features,
                          PredictStats* stats = nullptr);

// Versioned self-describing text format; save -> load round-trips to
// bitwise-identical predictions. Load throws FormatError naming the
// offending section.
void save_model(const GbdtModel& model, std::ostream& out);
GbdtModel load_model(std::istream& in);

void save_model_file(const GbdtModel& model, const std::string& path);
GbdtModel load_model_file(const std::string& path);

// Size of the serialized model in bytes.
std::uint64_t model_size_bytes(const GbdtModel& model);

}  // namespace flpxr
