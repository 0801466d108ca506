// Black-box tests of the flpxr binary: exit codes, file formats, and
// cross-command composition.

#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flpxr/csv.hpp"
#include "flpxr/features.hpp"
#include "flpxr/prep.hpp"
#include "support/synthetic.hpp"

using namespace flpxr;
using namespace flpxr::testsupport;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() /
             ("flpxr_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string cmd = std::string(FLPXR_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

// Raw AIS CSV in the default (Brest-style) column layout.
fs::path write_ais_csv(const char* name, const std::vector<AisRecord>& records) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << "sourcemmsi,t,lon,lat\n";
  for (const auto& r : records) {
    out << r.vessel_id << ',' << r.timestamp << ','
        << csv::format_double(r.pos.lon) << ',' << csv::format_double(r.pos.lat)
        << '\n';
  }
  return p;
}

fs::path fleet_csv(const char* name, int vessels, std::uint32_t seed,
                   std::int64_t duration_s = 3 * 3600) {
  FleetOptions opt;
  opt.vessels = vessels;
  opt.seed = seed;
  opt.duration_s = duration_s;
  return write_ais_csv(name, make_fleet(opt).records);
}

std::string path_of(const char* name) { return (work_dir() / name).string(); }

// A syntactically valid model with zero trees and zero base scores: the
// persistence predictor.
std::string zero_model_text() {
  std::ostringstream ss;
  ss << "FLPXR-MODEL\nVERSION 1\nPARAMS 9\n"
     << "n_estimators=0\nlearning_rate=0.01\nmax_depth=12\nn_bins=256\n"
     << "lambda=1\ngamma=0\nmin_child_weight=1\nrate_s=90\nhorizons=10,20\n"
     << "FEATURES 12\n";
  for (int i = 0; i < kFeatureCount; ++i) {
    ss << (i ? " " : "") << kFeatureNames[static_cast<std::size_t>(i)];
  }
  ss << "\nCATEGORIES\nvessel_type 0\n\norigin 0\n\n"
     << "BASE_SCORES 0 0\nTREES lon 0\nTREES lat 0\nEND\n";
  return ss.str();
}

}  // namespace

TEST_CASE("missing required flags exit with the configuration code") {
  const RunResult r = run_cli("preprocess");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--input") != std::string::npos);

  CHECK(run_cli("").exit_code == 2);            // no subcommand
  CHECK(run_cli("frobnicate").exit_code == 2);  // unknown subcommand
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("preprocess writes a trips file with exact grid spacing") {
  const fs::path ais = fleet_csv("pre_in.csv", 3, 11);
  const RunResult r = run_cli("preprocess --input " + ais.string() +
                              " --out " + path_of("pre_trips.csv"));
  REQUIRE(r.exit_code == 0);

  std::ifstream in(path_of("pre_trips.csv"));
  const auto trips = read_trips_csv(in);
  REQUIRE(trips.size() == 3);
  for (const auto& t : trips) {
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      CHECK(t.points[i].timestamp - t.points[i - 1].timestamp == 90);
    }
  }
  CHECK(r.err.find("trips: 3") != std::string::npos);
}

TEST_CASE("preprocess of an all-stationary fleet warns and writes no trips") {
  std::vector<AisRecord> records;
  for (int v = 0; v < 3; ++v) {
    for (int i = 0; i < 50; ++i) {
      records.push_back(AisRecord{std::to_string(v), 1000 + i * 90,
                                  GeoPoint{5.0, 40.0}, std::nullopt});
    }
  }
  const fs::path ais = write_ais_csv("stationary.csv", records);
  const RunResult r = run_cli("preprocess --input " + ais.string() +
                              " --out " + path_of("stationary_trips.csv"));
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("warning: no trips") != std::string::npos);
  std::ifstream in(path_of("stationary_trips.csv"));
  std::string header, rest;
  std::getline(in, header);
  CHECK(header == kTripsCsvHeader);
  CHECK(!std::getline(in, rest));  // header only
}

TEST_CASE("preprocess on an unreadable input exits with the I/O code") {
  const RunResult r = run_cli("preprocess --input /nonexistent/nope.csv --out " +
                              path_of("x.csv"));
  CHECK(r.exit_code == 3);
}

TEST_CASE("train/predict/evaluate/bench/grid work end to end") {
  const fs::path ais = fleet_csv("e2e.csv", 4, 17);
  REQUIRE(run_cli("preprocess --input " + ais.string() + " --out " +
                  path_of("e2e_trips.csv"))
              .exit_code == 0);

  SUBCASE("default hyperparameters are echoed into the model file") {
    // Single short trip: the 750-round default stays fast.
    std::ifstream in(path_of("e2e_trips.csv"));
    auto trips = read_trips_csv(in);
    trips.resize(1);
    std::ofstream small(path_of("small_trips.csv"));
    write_trips_csv(small, trips);
    small.close();

    const RunResult r = run_cli("train --input " + path_of("small_trips.csv") +
                                " --out " + path_of("default_model.txt"));
    REQUIRE(r.exit_code == 0);
    const std::string model = slurp(path_of("default_model.txt"));
    CHECK(model.find("max_depth=12") != std::string::npos);
    CHECK(model.find("learning_rate=0.01") != std::string::npos);
    CHECK(model.find("n_estimators=750") != std::string::npos);
    CHECK(r.err.find("training seconds:") != std::string::npos);
  }

  SUBCASE("zero rounds trains a usable mean-delta model with a warning") {
    const RunResult r = run_cli("train --input " + path_of("e2e_trips.csv") +
                                " --out " + path_of("mean_model.txt") +
                                " --rounds 0 --horizons 10");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(run_cli("predict --input " + path_of("e2e_trips.csv") +
                  " --model " + path_of("mean_model.txt") + " --out " +
                  path_of("mean_preds.csv"))
              .exit_code == 0);
  }

  SUBCASE("unreadable trips file exits with the I/O code") {
    CHECK(run_cli("train --input /nonexistent/trips.csv --out " +
                  path_of("m.txt"))
              .exit_code == 3);
  }

  SUBCASE("a zero-tree zero-base model predicts the current position") {
    write_file(work_dir() / "zero_model.txt", zero_model_text());
    const RunResult r =
        run_cli("predict --input " + path_of("e2e_trips.csv") + " --model " +
                path_of("zero_model.txt") + " --out " + path_of("zp.csv"));
    REQUIRE(r.exit_code == 0);

    std::ifstream trips_in(path_of("e2e_trips.csv"));
    const auto trips = read_trips_csv(trips_in);
    std::ifstream preds(path_of("zp.csv"));
    std::string line;
    std::getline(preds, line);  // header
    CHECK(line == "vessel_id,timestamp,horizon_min,pred_lon,pred_lat");
    std::size_t rows = 0, trip_idx = 0, point_idx = 0;
    int horizon_idx = 0;
    std::vector<std::string> fields;
    while (std::getline(preds, line)) {
      csv::split_line(line, fields);
      REQUIRE(fields.size() == 5);
      const auto& pt = trips[trip_idx].points[point_idx];
      CHECK(*csv::parse_int(fields[1]) == pt.timestamp);
      CHECK(*csv::parse_double(fields[3]) == pt.pos.lon);  // identity
      CHECK(*csv::parse_double(fields[4]) == pt.pos.lat);
      if (++horizon_idx == 2) {  // zero model carries horizons 10,20
        horizon_idx = 0;
        if (++point_idx == trips[trip_idx].points.size()) {
          point_idx = 0;
          ++trip_idx;
        }
      }
      ++rows;
    }
    std::size_t points = 0;
    for (const auto& t : trips) points += t.points.size();
    CHECK(rows == points * 2);  // exactly 2 rows per point
  }

  SUBCASE("malformed model file exits with the model code and a section") {
    write_file(work_dir() / "broken_model.txt",
               "FLPXR-MODEL\nVERSION 1\nPARAMS 9\ngarbage\n");
    const RunResult r =
        run_cli("predict --input " + path_of("e2e_trips.csv") + " --model " +
                path_of("broken_model.txt") + " --out " + path_of("bp.csv"));
    CHECK(r.exit_code == 5);
    CHECK(r.err.find("params") != std::string::npos);
    CHECK(!fs::exists(path_of("bp.csv")));  // no partial output
  }

  SUBCASE("one-shot evaluation prints the split and writes six rows") {
    const RunResult r = run_cli(
        "evaluate --input " + path_of("e2e_trips.csv") + " --out " +
        path_of("oneshot.csv") +
        " --rounds 25 --lr 0.1 --depth 4 --train-fraction 0.8");
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("80%/20%") != std::string::npos);
    std::ifstream rep(path_of("oneshot.csv"));
    std::string line;
    std::getline(rep, line);
    CHECK(line == "dataset,horizon_min,count,mean_m,std_m");
    int rows = 0;
    while (std::getline(rep, line)) ++rows;
    CHECK(rows == 6);
  }

  SUBCASE("predict piped into evaluate reproduces direct evaluation exactly") {
    REQUIRE(run_cli("train --input " + path_of("e2e_trips.csv") + " --out " +
                    path_of("comp_model.txt") +
                    " --rounds 30 --lr 0.1 --depth 5 --horizons 10,20,30")
                .exit_code == 0);
    REQUIRE(run_cli("predict --input " + path_of("e2e_trips.csv") +
                    " --model " + path_of("comp_model.txt") + " --out " +
                    path_of("comp_preds.csv"))
                .exit_code == 0);
    REQUIRE(run_cli("evaluate --input " + path_of("e2e_trips.csv") +
                    " --model " + path_of("comp_model.txt") + " --out " +
                    path_of("comp_direct.csv"))
                .exit_code == 0);
    REQUIRE(run_cli("evaluate --input " + path_of("e2e_trips.csv") +
                    " --predictions " + path_of("comp_preds.csv") + " --out " +
                    path_of("comp_oracle.csv"))
                .exit_code == 0);
    CHECK(slurp(path_of("comp_direct.csv")) ==
          slurp(path_of("comp_oracle.csv")));
  }

  SUBCASE("evaluating a perfect predictions file gives zero means") {
    std::ifstream trips_in(path_of("e2e_trips.csv"));
    const auto trips = read_trips_csv(trips_in);
    std::ofstream perfect(path_of("perfect_preds.csv"));
    perfect << "vessel_id,timestamp,horizon_min,pred_lon,pred_lat\n";
    for (const auto& trip : trips) {
      for (const auto& pt : trip.points) {
        for (int h : {10, 20}) {
          const auto cur = position_at(trip, pt.timestamp);
          const auto fut = position_at(trip, pt.timestamp + 60 * h);
          if (!fut) continue;
          const double lon = cur->lon + (fut->lon - cur->lon);
          const double lat = cur->lat + (fut->lat - cur->lat);
          perfect << trip.vessel_id << ',' << pt.timestamp << ',' << h << ','
                  << csv::format_double(lon) << ',' << csv::format_double(lat)
                  << '\n';
        }
      }
    }
    perfect.close();
    const RunResult r = run_cli("evaluate --input " + path_of("e2e_trips.csv") +
                                " --predictions " + path_of("perfect_preds.csv") +
                                " --out " + path_of("perfect_report.csv"));
    REQUIRE(r.exit_code == 0);
    std::ifstream rep(path_of("perfect_report.csv"));
    std::string line;
    std::getline(rep, line);
    std::vector<std::string> fields;
    while (std::getline(rep, line)) {
      csv::split_line(line, fields);
      REQUIRE(fields.size() == 5);
      CHECK(*csv::parse_double(fields[3]) == 0.0);  // mean
    }
  }

  SUBCASE("empty test set exits with the insufficient-data code") {
    const RunResult r =
        run_cli("evaluate --input " + path_of("e2e_trips.csv") +
                " --horizons 600 --rounds 5");  // horizon longer than trips
    CHECK(r.exit_code == 4);
  }
}

TEST_CASE("bench reports satisfy the throughput identity") {
  const fs::path ais = fleet_csv("bench.csv", 6, 23, 5 * 3600);
  write_file(work_dir() / "bench_model.txt", zero_model_text());
  const RunResult r = run_cli("bench --input " + ais.string() + " --model " +
                              path_of("bench_model.txt") +
                              " --batch-sizes 100,300 --out " +
                              path_of("bench_out.csv"));
  REQUIRE(r.exit_code == 0);

  std::ifstream rep(path_of("bench_out.csv"));
  std::string line;
  std::getline(rep, line);
  CHECK(line ==
        "batch_size,preprocess_us_per_record,inference_us_per_record,"
        "throughput_s_per_batch");
  int rows = 0;
  std::vector<std::string> fields;
  while (std::getline(rep, line)) {
    csv::split_line(line, fields);
    REQUIRE(fields.size() == 4);
    const double batch = *csv::parse_double(fields[0]);
    const double prep = *csv::parse_double(fields[1]);
    const double inf = *csv::parse_double(fields[2]);
    const double throughput = *csv::parse_double(fields[3]);
    CHECK(throughput == (prep + inf) * batch / 1e6);  // exact identity
    CHECK(prep > 0.0);
    ++rows;
  }
  CHECK(rows == 2);

  SUBCASE("input smaller than twice the largest batch is rejected") {
    const RunResult small = run_cli(
        "bench --input " + ais.string() + " --model " +
        path_of("bench_model.txt") + " --batch-sizes 1000000");
    CHECK(small.exit_code == 4);
  }
}

TEST_CASE("grid sweeps axes and rejects unknown ones") {
  const fs::path ais = fleet_csv("grid.csv", 4, 29);

  SUBCASE("explicit depth values give one row each") {
    const RunResult r = run_cli("grid --input " + ais.string() +
                                " --axis depth --values 2,4 --horizons 10,20 "
                                "--rounds 15 --lr 0.1 --out " +
                                path_of("grid_depth.csv"));
    REQUIRE(r.exit_code == 0);
    std::ifstream rep(path_of("grid_depth.csv"));
    std::string line;
    std::getline(rep, line);
    CHECK(line ==
          "axis,value,model_size_bytes,inference_us,training_s,err10,err20");
    int rows = 0;
    while (std::getline(rep, line)) {
      CHECK(line.rfind("max_depth,", 0) == 0);
      ++rows;
    }
    CHECK(rows == 2);
  }

  SUBCASE("rate axis re-preprocesses raw input") {
    const RunResult r = run_cli("grid --input " + ais.string() +
                                " --axis rate --values 90,180 --horizons 10 "
                                "--rounds 10 --lr 0.1 --depth 3 --out " +
                                path_of("grid_rate.csv"));
    REQUIRE(r.exit_code == 0);
    std::ifstream rep(path_of("grid_rate.csv"));
    std::string line;
    std::getline(rep, line);
    int rows = 0;
    while (std::getline(rep, line)) ++rows;
    CHECK(rows == 2);
  }

  SUBCASE("unknown axis exits with the configuration code") {
    const RunResult r = run_cli("grid --input " + ais.string() +
                                " --axis bogus --out " + path_of("g.csv"));
    CHECK(r.exit_code == 2);
  }
}
