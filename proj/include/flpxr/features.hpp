#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "flpxr/geo.hpp"
#include "flpxr/prep.hpp"

namespace flpxr {

// Fixed feature order. Serialized models record and verify it.
enum FeatureIndex : int {
  kFvType = 0,
  kFLon = 1,
  kFLat = 2,
  kFSpeed = 3,
  kFBearing = 4,
  kFExtrapDiffLon = 5,
  kFExtrapDiffLat = 6,
  kFLastDiffLon = 7,
  kFLastDiffLat = 8,
  kFOrigin = 9,
  kFOrigDist = 10,
  kFDeltaT = 11,
};

inline constexpr int kFeatureCount = 12;
extern const std::array<const char*, kFeatureCount> kFeatureNames;

using FeatureVector = std::array<double, kFeatureCount>;

// Missing marker for optional features (v_type, last_diff, origin).
inline constexpr double kMissingValue =
    std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct TrainingExample {
  FeatureVector features{};
  double target_dlon = 0.0;
  double target_dlat = 0.0;
  std::int64_t source_timestamp = 0;  // for chronological splitting
};

// Prediction horizons in minutes, strictly ascending.
struct HorizonSet {
  std::vector<int> minutes{10, 20, 30, 40, 50, 60};
  void validate() const;
};

// Stable ordinal encoding of the categorical features, built from the
// training trips in first-seen order. Unseen or absent values map to the
// missing sentinel. The mapping is persisted with the model.
class CategoryEncoder {
 public:
  CategoryEncoder() = default;
  CategoryEncoder(std::vector<int> vessel_type_vocab,
                  std::vector<int> origin_vocab);

  static CategoryEncoder fit(const std::vector<Trip>& trips);

  double encode_vessel_type(std::optional<int> raw) const;
  double encode_origin(std::optional<int> raw) const;

  const std::vector<int>& vessel_type_vocab() const { return vtype_vocab_; }
  const std::vector<int>& origin_vocab() const { return origin_vocab_; }

 private:
  std::vector<int> vtype_vocab_;   // code = position
  std::vector<int> origin_vocab_;
};

// Position at an arbitrary time inside the trip's grid span: exact grid
// point or linear interpolation between the bracketing grid points;
// nullopt outside [first, last].
std::optional<GeoPoint> position_at(const Trip& trip, std::int64_t t);

// The Table-I feature vector for grid point i at horizon dt_min.
FeatureVector extract_features(const Trip& trip, std::size_t i, int dt_min,
                               const CategoryEncoder& encoder);

// One example per (trip, grid index, horizon) whose future position at
// t_i + 60*dt lies inside the trip.
std::vector<TrainingExample> build_training_set(const std::vector<Trip>& trips,
                                                const HorizonSet& horizons,
                                                const CategoryEncoder& encoder);

// Table-II style statistics of a processed trip set.
struct HorizonCounts {
  int horizon_min = 0;
  std::uint64_t vessels = 0;  // vessels with >= 1 example
  std::uint64_t trips = 0;    // trips with >= 1 example
  std::uint64_t points = 0;   // examples
};
std::vector<HorizonCounts> count_examples(const std::vector<Trip>& trips,
                                          const HorizonSet& horizons);

// Matrix dump, header "dlon,dlat,ts,f0,...,f11"; missing -> empty field.
void write_examples_csv(std::ostream& out,
                        const std::vector<TrainingExample>& examples);

}  // namespace flpxr
