#include "flpxr/bench.hpp"

#include <algorithm>
#include <chrono>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"
#include "flpxr/features.hpp"

namespace flpxr {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// One pass of the serving pipeline over a batch: records -> trips ->
// per-point feature vectors for every model horizon.
std::vector<FeatureVector> preprocess_batch(
    const std::vector<AisRecord>& batch, const GbdtModel& model,
    const PrepConfig& prep, const PoiIndex& pois,
    const std::map<std::string, int>& vessel_types) {
  auto grouped = group_by_vessel(batch);
  const auto trips = prepare_trips(grouped, prep, pois, vessel_types);
  std::vector<FeatureVector> features;
  for (const Trip& trip : trips) {
    for (std::size_t i = 0; i < trip.points.size(); ++i) {
      for (int h : model.horizons) {
        features.push_back(extract_features(trip, i, h, model.encoder));
      }
    }
  }
  return features;
}

}  // namespace

std::vector<BenchRow> run_bench(const std::vector<AisRecord>& records,
                                const GbdtModel& model, const PrepConfig& prep,
                                const PoiIndex& pois,
                                const std::map<std::string, int>& vessel_types,
                                const BenchConfig& cfg) {
  if (cfg.batch_sizes.empty()) throw ConfigError("bench: no batch sizes");
  if (cfg.repetitions < 3) throw ConfigError("bench: need >= 3 repetitions");
  prep.validate();
  const std::size_t largest =
      *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
  if (largest == 0) throw ConfigError("bench: batch size must be positive");
  if (records.size() < 2 * largest) {
    throw InsufficientDataError(
        "bench: input must hold at least twice the largest batch (" +
        std::to_string(2 * largest) + " records)");
  }

  const std::size_t mid = records.size() / 2;

  // Warm-up: run the full pipeline over the first half, untimed.
  {
    std::vector<AisRecord> half(records.begin(),
                                records.begin() + static_cast<std::ptrdiff_t>(mid));
    const auto feats = preprocess_batch(half, model, prep, pois, vessel_types);
    for (const FeatureVector& fv : feats) {
      volatile double sink = predict_delta(model, fv).first;
      (void)sink;
    }
  }

  std::vector<BenchRow> rows;
  for (const std::size_t batch_size : cfg.batch_sizes) {
    std::vector<AisRecord> batch(
        records.begin() + static_cast<std::ptrdiff_t>(mid),
        records.begin() + static_cast<std::ptrdiff_t>(mid + batch_size));

    BenchRow row;
    row.batch_size = batch_size;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const auto t0 = Clock::now();
      const auto feats = preprocess_batch(batch, model, prep, pois, vessel_types);
      const auto t1 = Clock::now();
      double delta_sum = 0.0;
      for (const FeatureVector& fv : feats) {
        delta_sum += predict_delta(model, fv).first;
      }
      const auto t2 = Clock::now();
      volatile double sink = delta_sum;
      (void)sink;

      const double prep_us =
          std::chrono::duration<double, std::micro>(t1 - t0).count();
      const double inf_us =
          std::chrono::duration<double, std::micro>(t2 - t1).count();
      row.prep_reps_us.push_back(prep_us / static_cast<double>(batch_size));
      row.inf_reps_us.push_back(inf_us / static_cast<double>(batch_size));
      row.predictions_per_rep = feats.size();
    }
    row.preprocess_us_per_record = median(row.prep_reps_us);
    row.inference_us_per_record = median(row.inf_reps_us);
    row.throughput_s_per_batch =
        (row.preprocess_us_per_record + row.inference_us_per_record) *
        static_cast<double>(batch_size) / 1e6;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "batch_size,preprocess_us_per_record,inference_us_per_record,"
         "throughput_s_per_batch\n";
  for (const BenchRow& row : rows) {
    out << row.batch_size << ','
        << csv::format_double(row.preprocess_us_per_record) << ','
        << csv::format_double(row.inference_us_per_record) << ','
        << csv::format_double(row.throughput_s_per_batch) << '\n';
  }
  if (!out) throw IoError("failed to write bench CSV");
}

}  // namespace flpxr
