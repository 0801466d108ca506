#include <cmath>

#include "flpxr/error.hpp"
#include "flpxr/gbdt.hpp"

namespace flpxr {

namespace {

inline double tree_leaf_value(const Tree& tree, std::span<const double> f) {
  const TreeNode* nodes = tree.nodes.data();
  std::int32_t id = 0;
  while (!nodes[id].is_leaf) {
    const TreeNode& n = nodes[id];
    const double v = f[static_cast<std::size_t>(n.feature)];
    if (std::isnan(v)) {
      id = n.default_left ? n.left : n.right;
    } else {
      id = v <= n.threshold ? n.left : n.right;
    }
  }
  return nodes[id].value;
}

}  // namespace

double predict_ensemble(const Ensemble& ensemble, double learning_rate,
                        std::span<const double> features) {
  double acc = 0.0;
  for (const Tree& tree : ensemble.trees) {
    acc += tree_leaf_value(tree, features);
  }
  return ensemble.base_score + learning_rate * acc;
}

std::pair<double, double> predict_delta(const GbdtModel& model,
                                        std::span<const double> features) {
  if (features.size() != model.feature_names.size()) {
    throw SchemaError("predict: expected " +
                      std::to_string(model.feature_names.size()) +
                      " features, got " + std::to_string(features.size()));
  }
  return {predict_ensemble(model.lon, model.params.learning_rate, features),
          predict_ensemble(model.lat, model.params.learning_rate, features)};
}

GeoPoint predict_position(const GbdtModel& model,
                          std::span<const double> features,
                          PredictStats* stats) {
  const auto [dlon, dlat] = predict_delta(model, features);
  double lon = features[kFLon] + dlon;
  double lat = features[kFLat] + dlat;
  bool clamped = false;
  if (lon < -180.0) { lon = -180.0; clamped = true; }
  if (lon > 180.0) { lon = 180.0; clamped = true; }
  if (lat < -90.0) { lat = -90.0; clamped = true; }
  if (lat > 90.0) { lat = 90.0; clamped = true; }
  if (clamped && stats) ++stats->clamped;
  return GeoPoint{lon, lat};
}

}  // namespace flpxr
