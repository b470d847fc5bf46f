#pragma once

#include <string>
#include <vector>

#include "rsma/geometry.hpp"
#include "rsma/sweep.hpp"

namespace rsma {

// Scenario files are JSON. Recognized keys: room_dims, fixtures (position,
// led_count, semi_angle_deg, orientation), users (position, area_m2,
// refractive_index, fov_deg, filter_gain, responsivity, orientation),
// conversion_factor, noise_mode ("unit" | "physical"), noise_params.
// Omitted optics fields fall back to the defaults in geometry.hpp; unknown
// keys are rejected so typos cannot silently change an experiment.
RoomScenario parse_scenario(const std::string& json_text);
RoomScenario load_scenario(const std::string& path);

// Sweep specs are JSON: kind ("snr_sweep" | "separation_sweep"),
// scenario_file (resolved relative to the sweep file's directory),
// scenario_id, schemes, snr_points_db, separation_points_m, weights,
// workers, optimizer {max_iterations, rel_tolerance, restarts, rng_seed,
// subproblem {solver, inner_tolerance, max_inner_iterations}}.
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

// CSV with the fixed header
//   scheme,scenario_id,snr_db,separation_m,wsr,rate_u1,rate_u2,common_rate,iters,converged
// UTF-8, LF line endings, %.9g numbers, rows sorted by (scheme, point).
// Empty record lists and I/O failures throw IoError.
void write_results(const std::vector<ResultRecord>& records,
                   const std::string& out_path);

std::vector<ResultRecord> parse_results_csv(const std::string& path);

// Self-contained Python script that reads the CSV next to it and renders
// the WSR curves (vs SNR or vs separation, per the records' sweep kind).
void emit_plot_script(const std::vector<ResultRecord>& records,
                      const std::string& out_path);

}  // namespace rsma
