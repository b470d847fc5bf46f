#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsma/geometry.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/streams.hpp"

namespace rsma {

enum class SweepKind { SnrSweep, SeparationSweep };

struct SweepSpec {
  SweepKind kind = SweepKind::SnrSweep;
  std::string scenario_file;
  std::string scenario_id;  // defaults to the scenario file stem
  std::vector<Scheme> schemes{Scheme::RSMA, Scheme::NOMA, Scheme::SDMA};
  std::vector<double> snr_points_db{0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<double> separation_points_m;  // separation sweeps only
  Eigen::VectorXd weights;                  // defaults to uniform 1/K
  OptimizerConfig optimizer;
  int workers = 0;  // 0: hardware concurrency; env RSMA_VLC_WORKERS wins

  void validate() const;  // throws std::invalid_argument
};

std::vector<double> default_separation_points();  // 0..5 step 0.4

struct ResultRecord {
  Scheme scheme = Scheme::RSMA;
  std::string scenario_id;
  double snr_db = 0.0;
  std::optional<double> separation_m;
  double wsr = 0.0;
  Eigen::VectorXd overall_rates;  // per user
  double common_rate = 0.0;       // total allocated common rate
  int iterations = 0;
  bool converged = false;
};

// Runs every (scheme, point) pair of the sweep. SNR maps to the amplitude
// budget as epsilon = 10^(snr_db/10) against unit noise. Separation sweeps
// move the two users symmetrically apart from the room center along the
// x-axis (x = ±separation/2, y = 0), keeping each user's height. Points
// run concurrently; records come back sorted by (scheme, point). Per-point
// optimizer trouble lands in the record flags, never aborts the sweep.
std::vector<ResultRecord> run_sweep(const SweepSpec& spec,
                                    const RoomScenario& scenario);

// Loads the scenario from spec.scenario_file first.
std::vector<ResultRecord> run_sweep(const SweepSpec& spec);

int resolve_worker_count(int requested);  // applies RSMA_VLC_WORKERS

}  // namespace rsma
