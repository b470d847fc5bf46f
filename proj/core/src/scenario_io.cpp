#include "rsma/scenario_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rsma/errors.hpp"

namespace rsma {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader =
    "scheme,scenario_id,snr_db,separation_m,wsr,rate_u1,rate_u2,common_rate,"
    "iters,converged";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure: " + path);
  }
  return buf.str();
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ScenarioError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) {
    throw ScenarioError(field + ": expected a number");
  }
  return j.get<double>();
}

int as_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    throw ScenarioError(field + ": expected an integer");
  }
  return j.get<int>();
}

Eigen::Vector3d as_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw ScenarioError(field + ": expected an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    v(i) = as_number(j[i], field);
  }
  return v;
}

LedFixture parse_fixture(const json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ScenarioError(context + ": expected an object");
  }
  check_keys(j, context,
             {"position", "led_count", "semi_angle_deg", "orientation"});
  if (!j.contains("position")) {
    throw ScenarioError(context + ".position: required");
  }
  LedFixture f;
  f.position = as_vec3(j.at("position"), context + ".position");
  if (j.contains("led_count")) {
    f.led_count = as_integer(j.at("led_count"), context + ".led_count");
  }
  if (j.contains("semi_angle_deg")) {
    f.semi_angle_deg = as_number(j.at("semi_angle_deg"), context + ".semi_angle_deg");
  }
  if (j.contains("orientation")) {
    f.orientation = as_vec3(j.at("orientation"), context + ".orientation");
  }
  return f;
}

PhotoDetector parse_user(const json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ScenarioError(context + ": expected an object");
  }
  check_keys(j, context,
             {"position", "area_m2", "refractive_index", "fov_deg",
              "filter_gain", "responsivity", "orientation"});
  if (!j.contains("position")) {
    throw ScenarioError(context + ".position: required");
  }
  PhotoDetector u;
  u.position = as_vec3(j.at("position"), context + ".position");
  if (j.contains("area_m2")) {
    u.area_m2 = as_number(j.at("area_m2"), context + ".area_m2");
  }
  if (j.contains("refractive_index")) {
    u.refractive_index =
        as_number(j.at("refractive_index"), context + ".refractive_index");
  }
  if (j.contains("fov_deg")) {
    u.fov_deg = as_number(j.at("fov_deg"), context + ".fov_deg");
  }
  if (j.contains("filter_gain")) {
    u.filter_gain = as_number(j.at("filter_gain"), context + ".filter_gain");
  }
  if (j.contains("responsivity")) {
    u.responsivity = as_number(j.at("responsivity"), context + ".responsivity");
  }
  if (j.contains("orientation")) {
    u.orientation = as_vec3(j.at("orientation"), context + ".orientation");
  }
  return u;
}

NoiseParams parse_noise_params(const json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ScenarioError(context + ": expected an object");
  }
  check_keys(j, context,
             {"bandwidth_hz", "background_current_a", "noise_bw_factor_i2",
              "noise_bw_factor_i3", "temperature_k", "open_loop_gain",
              "capacitance_per_area_f_m2", "fet_noise_factor",
              "fet_transconductance_s"});
  NoiseParams np;
  auto grab = [&](const char* key, double& slot) {
    if (j.contains(key)) {
      slot = as_number(j.at(key), context + "." + key);
    }
  };
  grab("bandwidth_hz", np.bandwidth_hz);
  grab("background_current_a", np.background_current_a);
  grab("noise_bw_factor_i2", np.noise_bw_factor_i2);
  grab("noise_bw_factor_i3", np.noise_bw_factor_i3);
  grab("temperature_k", np.temperature_k);
  grab("open_loop_gain", np.open_loop_gain);
  grab("capacitance_per_area_f_m2", np.capacitance_per_area_f_m2);
  grab("fet_noise_factor", np.fet_noise_factor);
  grab("fet_transconductance_s", np.fet_transconductance_s);
  return np;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(what + ": " + e.what());
  }
}

Scheme scheme_from_name(const std::string& name, const std::string& context) {
  if (name == "RSMA") return Scheme::RSMA;
  if (name == "SDMA") return Scheme::SDMA;
  if (name == "NOMA") return Scheme::NOMA;
  throw ScenarioError(context + ": unknown scheme '" + name + "'");
}

std::string format_g9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

}  // namespace

RoomScenario parse_scenario(const std::string& json_text) {
  const json root = parse_json_text(json_text, "scenario parse error");
  if (!root.is_object()) {
    throw ScenarioError("scenario: top level must be an object");
  }
  check_keys(root, "scenario",
             {"room_dims", "fixtures", "users", "conversion_factor",
              "noise_mode", "noise_params"});

  RoomScenario sc;
  if (root.contains("room_dims")) {
    sc.room_dims = as_vec3(root.at("room_dims"), "room_dims");
  }
  if (root.contains("fixtures")) {
    const json& arr = root.at("fixtures");
    if (!arr.is_array()) {
      throw ScenarioError("fixtures: expected an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      sc.fixtures.push_back(
          parse_fixture(arr[i], "fixtures[" + std::to_string(i) + "]"));
    }
  }
  if (root.contains("users")) {
    const json& arr = root.at("users");
    if (!arr.is_array()) {
      throw ScenarioError("users: expected an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      sc.users.push_back(parse_user(arr[i], "users[" + std::to_string(i) + "]"));
    }
  }
  if (root.contains("conversion_factor")) {
    sc.conversion_factor =
        as_number(root.at("conversion_factor"), "conversion_factor");
  }
  if (root.contains("noise_mode")) {
    const json& m = root.at("noise_mode");
    if (!m.is_string()) {
      throw ScenarioError("noise_mode: expected \"unit\" or \"physical\"");
    }
    const std::string mode = m.get<std::string>();
    if (mode == "unit") {
      sc.noise_mode = NoiseMode::Unit;
    } else if (mode == "physical") {
      sc.noise_mode = NoiseMode::Physical;
    } else {
      throw ScenarioError("noise_mode: expected \"unit\" or \"physical\", got '" +
                          mode + "'");
    }
  }
  if (root.contains("noise_params")) {
    sc.noise_params = parse_noise_params(root.at("noise_params"), "noise_params");
  }
  sc.validate();
  return sc;
}

RoomScenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path));
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  const json root = parse_json_text(json_text, "sweep spec parse error");
  if (!root.is_object()) {
    throw ScenarioError("sweep spec: top level must be an object");
  }
  check_keys(root, "sweep spec",
             {"kind", "scenario_file", "scenario_id", "schemes",
              "snr_points_db", "separation_points_m", "weights", "workers",
              "optimizer"});

  SweepSpec spec;
  if (!root.contains("kind") || !root.at("kind").is_string()) {
    throw ScenarioError("kind: required string");
  }
  const std::string kind = root.at("kind").get<std::string>();
  if (kind == "snr_sweep") {
    spec.kind = SweepKind::SnrSweep;
  } else if (kind == "separation_sweep") {
    spec.kind = SweepKind::SeparationSweep;
  } else {
    throw ScenarioError("kind: expected snr_sweep or separation_sweep, got '" +
                        kind + "'");
  }
  if (!root.contains("scenario_file") || !root.at("scenario_file").is_string()) {
    throw ScenarioError("scenario_file: required string");
  }
  spec.scenario_file = root.at("scenario_file").get<std::string>();
  if (root.contains("scenario_id")) {
    if (!root.at("scenario_id").is_string()) {
      throw ScenarioError("scenario_id: expected a string");
    }
    spec.scenario_id = root.at("scenario_id").get<std::string>();
  } else {
    spec.scenario_id = std::filesystem::path(spec.scenario_file).stem().string();
  }
  if (root.contains("schemes")) {
    const json& arr = root.at("schemes");
    if (!arr.is_array() || arr.empty()) {
      throw ScenarioError("schemes: expected a non-empty array");
    }
    spec.schemes.clear();
    for (const json& item : arr) {
      if (!item.is_string()) {
        throw ScenarioError("schemes: expected scheme names");
      }
      spec.schemes.push_back(scheme_from_name(item.get<std::string>(), "schemes"));
    }
  }
  auto grab_points = [&](const char* key, std::vector<double>& out) {
    if (!root.contains(key)) return;
    const json& arr = root.at(key);
    if (!arr.is_array()) {
      throw ScenarioError(std::string(key) + ": expected an array of numbers");
    }
    out.clear();
    for (const json& item : arr) {
      out.push_back(as_number(item, key));
    }
  };
  grab_points("snr_points_db", spec.snr_points_db);
  grab_points("separation_points_m", spec.separation_points_m);
  if (spec.kind == SweepKind::SeparationSweep && spec.separation_points_m.empty()) {
    spec.separation_points_m = default_separation_points();
  }
  if (root.contains("weights")) {
    const json& arr = root.at("weights");
    if (!arr.is_array() || arr.empty()) {
      throw ScenarioError("weights: expected a non-empty array");
    }
    spec.weights.resize(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spec.weights(static_cast<Eigen::Index>(i)) = as_number(arr[i], "weights");
    }
  }
  if (root.contains("workers")) {
    spec.workers = as_integer(root.at("workers"), "workers");
    if (spec.workers < 0) {
      throw ScenarioError("workers: must be >= 0");
    }
  }
  if (root.contains("optimizer")) {
    const json& opt = root.at("optimizer");
    if (!opt.is_object()) {
      throw ScenarioError("optimizer: expected an object");
    }
    check_keys(opt, "optimizer",
               {"max_iterations", "rel_tolerance", "restarts", "rng_seed",
                "subproblem"});
    if (opt.contains("max_iterations")) {
      spec.optimizer.max_iterations =
          as_integer(opt.at("max_iterations"), "optimizer.max_iterations");
    }
    if (opt.contains("rel_tolerance")) {
      spec.optimizer.rel_tolerance =
          as_number(opt.at("rel_tolerance"), "optimizer.rel_tolerance");
    }
    if (opt.contains("restarts")) {
      spec.optimizer.restarts =
          as_integer(opt.at("restarts"), "optimizer.restarts");
    }
    if (opt.contains("rng_seed")) {
      const json& seed = opt.at("rng_seed");
      if (!seed.is_number_integer()) {
        throw ScenarioError("optimizer.rng_seed: expected an integer");
      }
      spec.optimizer.rng_seed = seed.get<std::uint64_t>();
    }
    if (opt.contains("subproblem")) {
      const json& sub = opt.at("subproblem");
      if (!sub.is_object()) {
        throw ScenarioError("optimizer.subproblem: expected an object");
      }
      check_keys(sub, "optimizer.subproblem",
                 {"solver", "inner_tolerance", "max_inner_iterations",
                  "max_alm_rounds", "alm_initial_penalty", "admm_step"});
      if (sub.contains("solver")) {
        const json& solver = sub.at("solver");
        const std::string name =
            solver.is_string() ? solver.get<std::string>() : std::string();
        if (name == "projected_gradient") {
          spec.optimizer.subproblem.solver = SubproblemSolver::ProjectedGradient;
        } else if (name == "admm") {
          spec.optimizer.subproblem.solver = SubproblemSolver::Admm;
        } else {
          throw ScenarioError(
              "optimizer.subproblem.solver: expected projected_gradient or admm");
        }
      }
      if (sub.contains("inner_tolerance")) {
        spec.optimizer.subproblem.inner_tolerance = as_number(
            sub.at("inner_tolerance"), "optimizer.subproblem.inner_tolerance");
      }
      if (sub.contains("max_inner_iterations")) {
        spec.optimizer.subproblem.max_inner_iterations =
            as_integer(sub.at("max_inner_iterations"),
                       "optimizer.subproblem.max_inner_iterations");
      }
      if (sub.contains("max_alm_rounds")) {
        spec.optimizer.subproblem.max_alm_rounds = as_integer(
            sub.at("max_alm_rounds"), "optimizer.subproblem.max_alm_rounds");
      }
      if (sub.contains("alm_initial_penalty")) {
        spec.optimizer.subproblem.alm_initial_penalty =
            as_number(sub.at("alm_initial_penalty"),
                      "optimizer.subproblem.alm_initial_penalty");
      }
      if (sub.contains("admm_step")) {
        spec.optimizer.subproblem.admm_step =
            as_number(sub.at("admm_step"), "optimizer.subproblem.admm_step");
      }
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  SweepSpec spec = parse_sweep_spec(read_file(path));
  const std::filesystem::path scenario(spec.scenario_file);
  if (scenario.is_relative()) {
    spec.scenario_file =
        (std::filesystem::path(path).parent_path() / scenario).string();
  }
  return spec;
}

void write_results(const std::vector<ResultRecord>& records,
                   const std::string& out_path) {
  if (records.empty()) {
    throw IoError("write_results: refusing to write an empty record list");
  }
  std::vector<ResultRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ResultRecord& a, const ResultRecord& b) {
                     if (a.scheme != b.scheme) return a.scheme < b.scheme;
                     if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                     return a.separation_m.value_or(-1.0) <
                            b.separation_m.value_or(-1.0);
                   });

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + out_path);
  }
  out << kCsvHeader << "\n";
  for (const ResultRecord& r : sorted) {
    if (r.overall_rates.size() != 2) {
      throw IoError("write_results: records must carry exactly 2 user rates");
    }
    out << scheme_name(r.scheme) << ',' << r.scenario_id << ','
        << format_g9(r.snr_db) << ','
        << (r.separation_m ? format_g9(*r.separation_m) : std::string()) << ','
        << format_g9(r.wsr) << ',' << format_g9(r.overall_rates(0)) << ','
        << format_g9(r.overall_rates(1)) << ',' << format_g9(r.common_rate)
        << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << "\n";
  }
  out.flush();
  if (!out) {
    throw IoError("write failure: " + out_path);
  }
}

std::vector<ResultRecord> parse_results_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError("results CSV header mismatch: " + path);
  }
  std::vector<ResultRecord> records;
  auto to_double = [&](const std::string& field) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
      throw IoError("results CSV: bad number '" + field + "' in " + path);
    }
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 10) {
      throw IoError("results CSV: expected 10 fields per row in " + path);
    }
    ResultRecord r;
    r.scheme = scheme_from_name(fields[0], "results CSV");
    r.scenario_id = fields[1];
    r.snr_db = to_double(fields[2]);
    if (!fields[3].empty()) {
      r.separation_m = to_double(fields[3]);
    }
    r.wsr = to_double(fields[4]);
    r.overall_rates.resize(2);
    r.overall_rates(0) = to_double(fields[5]);
    r.overall_rates(1) = to_double(fields[6]);
    r.common_rate = to_double(fields[7]);
    r.iterations = static_cast<int>(to_double(fields[8]));
    r.converged = fields[9] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

void emit_plot_script(const std::vector<ResultRecord>& records,
                      const std::string& out_path) {
  if (records.empty()) {
    throw IoError("emit_plot_script: refusing to write for an empty record list");
  }
  const bool separation =
      std::any_of(records.begin(), records.end(),
                  [](const ResultRecord& r) { return r.separation_m.has_value(); });

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + out_path);
  }
  out << "#!/usr/bin/env python3\n"
         "\"\"\"Render WSR curves from a results CSV (path as the only\n"
         "argument, default results.csv next to this script).\"\"\"\n"
         "import csv\n"
         "import os\n"
         "import sys\n"
         "from collections import defaultdict\n"
         "\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, \"results.csv\")\n"
         "with open(path, newline=\"\") as fh:\n"
         "    rows = list(csv.DictReader(fh))\n"
         "if not rows:\n"
         "    sys.exit(\"no data rows in \" + path)\n"
         "\n";
  if (separation) {
    out << "series = defaultdict(list)\n"
           "for r in rows:\n"
           "    key = (r[\"scheme\"], float(r[\"snr_db\"]))\n"
           "    series[key].append((float(r[\"separation_m\"]), float(r[\"wsr\"])))\n"
           "fig, ax = plt.subplots(figsize=(7, 5))\n"
           "for (scheme, snr), pts in sorted(series.items()):\n"
           "    pts.sort()\n"
           "    ax.plot([p[0] for p in pts], [p[1] for p in pts],\n"
           "            marker=\"o\", label=f\"{scheme}, {snr:g} dB\")\n"
           "ax.set_xlabel(\"user separation (m)\")\n";
  } else {
    out << "series = defaultdict(list)\n"
           "for r in rows:\n"
           "    series[r[\"scheme\"]].append((float(r[\"snr_db\"]), float(r[\"wsr\"])))\n"
           "fig, ax = plt.subplots(figsize=(7, 5))\n"
           "for scheme, pts in sorted(series.items()):\n"
           "    pts.sort()\n"
           "    ax.plot([p[0] for p in pts], [p[1] for p in pts],\n"
           "            marker=\"o\", label=scheme)\n"
           "ax.set_xlabel(\"SNR (dB)\")\n";
  }
  out << "ax.set_ylabel(\"weighted sum rate (bits/s/Hz)\")\n"
         "ax.grid(True, alpha=0.4)\n"
         "ax.legend()\n"
         "out_png = os.path.splitext(path)[0] + \".png\"\n"
         "fig.tight_layout()\n"
         "fig.savefig(out_png, dpi=150)\n"
         "print(\"wrote\", out_png)\n";
  out.flush();
  if (!out) {
    throw IoError("write failure: " + out_path);
  }
}

}  // namespace rsma
