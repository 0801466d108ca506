#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flpxr/ais.hpp"
#include "flpxr/gbdt.hpp"
#include "flpxr/prep.hpp"

namespace flpxr {

struct BenchConfig {
  std::vector<std::size_t> batch_sizes{10'000, 100'000};
  int repetitions = 3;  // per-record figures are medians over these
};

struct BenchRow {
  std::size_t batch_size = 0;
  double preprocess_us_per_record = 0.0;
  double inference_us_per_record = 0.0;
  double throughput_s_per_batch = 0.0;  // (prep + inf) * batch / 1e6

  // Raw per-repetition measurements (per record, microseconds).
  std::vector<double> prep_reps_us;
  std::vector<double> inf_reps_us;
  std::uint64_t predictions_per_rep = 0;
};

// Timing protocol: the first half of the input is processed untimed to
// warm up, then each batch (a contiguous slice after the midpoint) is
// preprocessed and predicted `repetitions` times on a monotonic clock.
// Preprocessing covers grouping, cleaning, resampling and feature
// extraction; inference covers the delta predictions for every grid
// point at every model horizon. Throws InsufficientDataError when the
// input is smaller than twice the largest batch.
std::vector<BenchRow> run_bench(const std::vector<AisRecord>& records,
                                const GbdtModel& model, const PrepConfig& prep,
                                const PoiIndex& pois,
                                const std::map<std::string, int>& vessel_types,
                                const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace flpxr
