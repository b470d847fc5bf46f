#pragma once

#include <Eigen/Dense>

#include "rsma/geometry.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/streams.hpp"

namespace rsma {

// Exhaustive reference optimizer for validation. Precoder entries range
// over the signed lattice {-N..N} * grid_resolution clipped to the per-row
// L1 budget; the common split is then allocated exactly (it enters the
// objective linearly). Rejects instances with more than 2 fixtures or more
// than 3 streams via std::invalid_argument. Deterministic.
Solution brute_force_wsr(const Eigen::MatrixXd& channel,
                         const Eigen::VectorXd& noise_vars,
                         const Eigen::VectorXd& weights,
                         const StreamPlan& plan, double epsilon,
                         double grid_resolution);

Solution brute_force_wsr(const RoomScenario& scenario, const StreamPlan& plan,
                         const Eigen::VectorXd& weights, double epsilon,
                         double grid_resolution);

}  // namespace rsma
