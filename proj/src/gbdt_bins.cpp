#include <algorithm>
#include <cmath>

#include "flpxr/error.hpp"
#include "flpxr/gbdt.hpp"

namespace flpxr {

void GbdtParams::validate() const {
  if (n_estimators < 0) throw ConfigError("gbdt: n_estimators must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ConfigError("gbdt: learning_rate must be > 0");
  }
  if (max_depth < 1) throw ConfigError("gbdt: max_depth must be >= 1");
  if (n_bins < 2 || n_bins > 256) {
    throw ConfigError("gbdt: n_bins must be in [2, 256]");
  }
  if (!(lambda >= 0.0)) throw ConfigError("gbdt: lambda must be >= 0");
  if (!(gamma >= 0.0)) throw ConfigError("gbdt: gamma must be >= 0");
  if (!(min_child_weight >= 0.0)) {
    throw ConfigError("gbdt: min_child_weight must be >= 0");
  }
}

DataMatrix to_matrix(const std::vector<TrainingExample>& examples) {
  DataMatrix m;
  m.rows = examples.size();
  m.cols = kFeatureCount;
  m.values.reserve(m.rows * m.cols);
  for (const TrainingExample& ex : examples) {
    m.values.insert(m.values.end(), ex.features.begin(), ex.features.end());
  }
  return m;
}

BinSchema build_bins(const DataMatrix& m, int n_bins) {
  if (m.rows == 0) throw InvalidInput("build_bins: empty matrix");
  BinSchema schema;
  schema.thresholds.resize(m.cols);

  std::vector<double> vals;
  for (std::size_t f = 0; f < m.cols; ++f) {
    vals.clear();
    vals.reserve(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double v = m.at(r, f);
      if (!std::isnan(v)) vals.push_back(v);
    }
    if (vals.size() < 2) continue;  // constant or all-missing: unsplittable
    std::sort(vals.begin(), vals.end());

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] != vals[i - 1]) ++distinct;
    }
    if (distinct < 2) continue;

    auto& thresholds = schema.thresholds[f];
    if (distinct <= static_cast<std::size_t>(n_bins)) {
      // Lossless: one threshold between each adjacent distinct pair.
      for (std::size_t i = 1; i < vals.size(); ++i) {
        const double a = vals[i - 1];
        const double b = vals[i];
        if (a == b) continue;
        double mid = a + (b - a) * 0.5;
        if (mid >= b) mid = a;  // adjacent representable doubles
        if (thresholds.empty() || mid > thresholds.back()) {
          thresholds.push_back(mid);
        }
      }
    } else {
      // Evenly spaced quantiles of the sorted non-missing values.
      const std::size_t n = vals.size();
      for (int k = 1; k < n_bins; ++k) {
        const std::size_t idx =
            static_cast<std::size_t>(k) * n / static_cast<std::size_t>(n_bins);
        const double cand = vals[idx];
        if (cand >= vals.back()) break;  // keep the top bin non-empty
        if (thresholds.empty() || cand > thresholds.back()) {
          thresholds.push_back(cand);
        }
      }
    }
  }
  return schema;
}

}  // namespace flpxr
