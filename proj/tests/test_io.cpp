#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rsma/errors.hpp"
#include "rsma/scenario_io.hpp"

using namespace rsma;
namespace fs = std::filesystem;

namespace {

const std::string kScenarioDir = RSMA_VLC_SCENARIO_DIR;

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ResultRecord> sample_records() {
  std::vector<ResultRecord> recs;
  int i = 0;
  for (auto scheme : {Scheme::RSMA, Scheme::NOMA, Scheme::SDMA}) {
    for (double snr = 0.0; snr <= 40.0; snr += 5.0) {
      ResultRecord r;
      r.scheme = scheme;
      r.scenario_id = "unit";
      r.snr_db = snr;
      r.wsr = 0.123456789012345 * (1 + i);
      r.overall_rates = Eigen::VectorXd::Zero(2);
      r.overall_rates << 0.07 * (1 + i), 0.05 * (1 + i);
      r.common_rate = scheme == Scheme::SDMA ? 0.0 : 0.01 * (1 + i);
      r.iterations = i;
      r.converged = (i % 2) == 0;
      recs.push_back(r);
      ++i;
    }
  }
  return recs;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("bundled scenario files load with the documented geometry") {
  const auto sc = load_scenario(kScenarioDir + "/scenario1_4led.json");
  CHECK(sc.fixtures.size() == 4);
  REQUIRE(sc.users.size() == 2);
  CHECK((sc.users[0].position - sc.users[1].position).norm() ==
        doctest::Approx(3.0));
  // omitted optics pick up the bench defaults
  CHECK(sc.fixtures[0].led_count == 3600);
  CHECK(sc.fixtures[0].semi_angle_deg == doctest::Approx(60.0));
  CHECK(sc.users[0].area_m2 == doctest::Approx(1e-4));
  CHECK(sc.users[0].refractive_index == doctest::Approx(1.5));
  CHECK(sc.users[0].fov_deg == doctest::Approx(60.0));
  CHECK(sc.users[0].filter_gain == doctest::Approx(1.0));

  const auto sc2 = load_scenario(kScenarioDir + "/scenario2_4led.json");
  CHECK((sc2.users[0].position - sc2.users[1].position).norm() ==
        doctest::Approx(0.4));
  const auto sc3 = load_scenario(kScenarioDir + "/scenario1_2led.json");
  CHECK(sc3.fixtures.size() == 2);
}

TEST_CASE("scenario parse rejects bad values naming the key") {
  const char* fov_violation = R"({
    "room_dims": [5, 5, 4],
    "fixtures": [{"position": [0, 0, 4]}],
    "users": [{"position": [0, 0, 0.8], "fov_deg": 120}]
  })";
  CHECK_THROWS_AS(parse_scenario(fov_violation), ScenarioError);
  try {
    parse_scenario(fov_violation);
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("fov") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected, not ignored") {
  const char* typo = R"({
    "room_dims": [5, 5, 4],
    "fixtures": [{"position": [0, 0, 4], "led_cuont": 100}],
    "users": [{"position": [0, 0, 0.8]}]
  })";
  CHECK_THROWS_AS(parse_scenario(typo), ScenarioError);
  try {
    parse_scenario(typo);
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("led_cuont") != std::string::npos);
  }
}

TEST_CASE("scenario parse failures carry diagnostics") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), IoError);
}

TEST_CASE("omitted led_count falls back to the bench default") {
  const char* text = R"({
    "room_dims": [5, 5, 4],
    "fixtures": [{"position": [0, 0, 4]}],
    "users": [{"position": [0, 0, 0.8]}]
  })";
  const auto sc = parse_scenario(text);
  CHECK(sc.fixtures[0].led_count == 3600);
}

TEST_CASE("sweep spec defaults") {
  const std::string spec_json = std::string(R"({
    "kind": "snr_sweep",
    "scenario_file": ")") + kScenarioDir + R"(/scenario1_4led.json"
  })";
  const auto spec = parse_sweep_spec(spec_json);
  CHECK(spec.kind == SweepKind::SnrSweep);
  CHECK(spec.scenario_id == "scenario1_4led");
  CHECK(spec.schemes.size() == 3);
  REQUIRE(spec.snr_points_db.size() == 9);
  CHECK(spec.snr_points_db.front() == 0.0);
  CHECK(spec.snr_points_db.back() == 40.0);
  CHECK(spec.optimizer.restarts == 5);
}

TEST_CASE("separation sweep fills the default grid") {
  const std::string spec_json = std::string(R"({
    "kind": "separation_sweep",
    "scenario_file": ")") + kScenarioDir + R"(/scenario1_2led.json"
  })";
  const auto spec = parse_sweep_spec(spec_json);
  REQUIRE(spec.separation_points_m.size() == 13);
  CHECK(spec.separation_points_m[0] == 0.0);
  CHECK(spec.separation_points_m[9] == doctest::Approx(3.6));
  CHECK(spec.separation_points_m.back() == doctest::Approx(4.8));
}

TEST_CASE("sweep spec rejects unknown keys and bad kinds") {
  CHECK_THROWS_AS(parse_sweep_spec(R"({"kind": "voltage_sweep",
                                       "scenario_file": "x.json"})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_sweep_spec(R"({"kind": "snr_sweep",
                                       "scenario_file": "x.json",
                                       "snr_poimts_db": [0]})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_sweep_spec(R"({"scenario_file": "x.json"})"),
                  ScenarioError);
}

TEST_CASE("bundled sweep specs resolve their scenario relative to the file") {
  const auto spec =
      load_sweep_spec(kScenarioDir + "/sweep_snr_scenario1_4led.json");
  CHECK(fs::path(spec.scenario_file).is_absolute());
  CHECK_NOTHROW(load_scenario(spec.scenario_file));
  CHECK(spec.optimizer.rng_seed == 7);
}

TEST_CASE("csv shape: header, one row per record, LF endings, sorted") {
  const auto recs = sample_records();
  const auto path = temp_file("rsma_io_shape.csv");
  write_results(recs, path.string());
  const auto text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');

  std::istringstream lines(text);
  std::string line;
  int count = 0;
  std::string first;
  while (std::getline(lines, line)) {
    if (count == 0) first = line;
    ++count;
  }
  CHECK(count == 28);  // header + 27 records
  CHECK(first ==
        "scheme,scenario_id,snr_db,separation_m,wsr,rate_u1,rate_u2,"
        "common_rate,iters,converged");
  // snr sweep rows leave the separation field empty
  CHECK(text.find(",,") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("csv round-trips every numeric field") {
  const auto recs = sample_records();
  const auto path = temp_file("rsma_io_roundtrip.csv");
  write_results(recs, path.string());
  const auto back = parse_results_csv(path.string());
  REQUIRE(back.size() == recs.size());
  // rows come back sorted; compare against a sorted copy
  auto sorted = recs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ResultRecord& a, const ResultRecord& b) {
                     if (a.scheme != b.scheme) return a.scheme < b.scheme;
                     return a.snr_db < b.snr_db;
                   });
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].scheme == sorted[i].scheme);
    CHECK(back[i].scenario_id == sorted[i].scenario_id);
    CHECK(back[i].snr_db == doctest::Approx(sorted[i].snr_db));
    // %.9g keeps nine significant digits
    CHECK(back[i].wsr ==
          doctest::Approx(sorted[i].wsr).epsilon(1e-8));
    CHECK(back[i].overall_rates(0) ==
          doctest::Approx(sorted[i].overall_rates(0)).epsilon(1e-8));
    CHECK(back[i].overall_rates(1) ==
          doctest::Approx(sorted[i].overall_rates(1)).epsilon(1e-8));
    CHECK(back[i].common_rate ==
          doctest::Approx(sorted[i].common_rate).epsilon(1e-8));
    CHECK(back[i].iterations == sorted[i].iterations);
    CHECK(back[i].converged == sorted[i].converged);
    CHECK_FALSE(back[i].separation_m.has_value());
  }
  fs::remove(path);
}

TEST_CASE("separation records keep their separation on disk") {
  auto recs = sample_records();
  recs.resize(3);
  for (std::size_t i = 0; i < recs.size(); ++i)
    recs[i].separation_m = 0.4 * static_cast<double>(i);
  const auto path = temp_file("rsma_io_sep.csv");
  write_results(recs, path.string());
  const auto back = parse_results_csv(path.string());
  REQUIRE(back.size() == 3);
  for (const auto& r : back) {
    REQUIRE(r.separation_m.has_value());
  }
  fs::remove(path);
}

TEST_CASE("empty record list is refused") {
  CHECK_THROWS_AS(write_results({}, temp_file("rsma_io_empty.csv").string()),
                  IoError);
}

TEST_CASE("unwritable output path surfaces as an io error with the path") {
  const auto recs = sample_records();
  const std::string bad = "/nonexistent_dir_rsma/out.csv";
  CHECK_THROWS_AS(write_results(recs, bad), IoError);
  try {
    write_results(recs, bad);
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("nonexistent_dir_rsma") !=
          std::string::npos);
  }
}

TEST_CASE("csv parser rejects a mangled header") {
  const auto path = temp_file("rsma_io_badheader.csv");
  {
    std::ofstream out(path, std::ios::binary);
    out << "scheme,snr_db\nRSMA,0\n";
  }
  CHECK_THROWS_AS(parse_results_csv(path.string()), IoError);
  fs::remove(path);
}

TEST_CASE("plot script is self-contained and names the csv") {
  const auto recs = sample_records();
  const auto path = temp_file("rsma_io_plot.py");
  emit_plot_script(recs, path.string());
  const auto text = slurp(path);
  CHECK(text.find("matplotlib") != std::string::npos);
  CHECK(text.find("csv") != std::string::npos);
  CHECK(text.find("snr") != std::string::npos);
  fs::remove(path);
}

}  // TEST_SUITE
