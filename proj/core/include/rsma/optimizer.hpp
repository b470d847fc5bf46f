#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rsma/geometry.hpp"
#include "rsma/streams.hpp"

namespace rsma {

enum class SubproblemSolver { ProjectedGradient, Admm };

// Inner convex subproblem: precoder and common split at fixed equalizers
// and MSE weights. The coupled common-rate constraints are handled by an
// augmented Lagrangian outer loop; each round minimizes the smooth
// augmented objective over the projectable set (per-row L1 balls, split
// nonnegativity) with either projected gradient or an ADMM splitting.
struct SubproblemConfig {
  SubproblemSolver solver = SubproblemSolver::ProjectedGradient;
  double inner_tolerance = 1e-7;
  int max_inner_iterations = 300;  // per augmented Lagrangian round
  int max_alm_rounds = 30;
  double alm_initial_penalty = 1.0;
  double admm_step = 1.0;
};

struct OptimizerConfig {
  int max_iterations = 200;
  double rel_tolerance = 1e-5;  // on WSR change, relative to max(1, |WSR|)
  int restarts = 5;
  std::uint64_t rng_seed = 1;
  SubproblemConfig subproblem;

  void validate() const;  // throws std::invalid_argument
};

struct Solution {
  Precoder precoder;
  Eigen::VectorXd common_split;
  RateReport report;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> wsr_trace;  // one entry per AO iteration, non-decreasing
};

// Scalar WMMSE quantities per user: equalizers g and MSE weights u for the
// private stage and, where the plan has a common stream, the common stage.
// Entries of common_* are 0 (g) and 1 (u) for users that do not decode it.
struct WmmseState {
  Eigen::VectorXd private_g;
  Eigen::VectorXd common_g;
  Eigen::VectorXd private_u;
  Eigen::VectorXd common_u;
};

struct AoState {
  Eigen::MatrixXd channel;      // K x L
  Eigen::VectorXd noise_vars;   // K
  Eigen::VectorXd weights;      // K
  StreamPlan plan;
  double epsilon = 0.0;
  SubproblemConfig subproblem;

  Eigen::MatrixXd columns;      // L x S, feasible
  Eigen::VectorXd common_split; // K
  WmmseState wmmse;
  double surrogate = 0.0;       // weighted sum of surrogate rates + split
};

AoState make_ao_state(const Eigen::MatrixXd& channel,
                      const Eigen::VectorXd& noise_vars,
                      const Eigen::VectorXd& weights, const StreamPlan& plan,
                      double epsilon, const SubproblemConfig& subconfig,
                      const Eigen::MatrixXd& initial_columns);

// One AO cycle: equalizer update, MSE-weight update, then the convex
// precoder-and-split subproblem. Never decreases state.surrogate.
AoState ao_step(AoState state);

struct SubproblemResult {
  Eigen::MatrixXd columns;
  Eigen::VectorXd common_split;
  double objective = 0.0;  // minimization form, at the returned point
  bool converged = false;
  int inner_iterations = 0;
};

SubproblemResult solve_precoder_subproblem(
    const Eigen::MatrixXd& channel, const Eigen::VectorXd& noise_vars,
    const Eigen::VectorXd& weights, const StreamPlan& plan,
    const WmmseState& wmmse, double epsilon, const SubproblemConfig& config,
    const Eigen::MatrixXd& warm_columns, const Eigen::VectorXd& warm_split);

// Minimization objective the subproblem drives down:
//   -sum_k w_k (surrogate private rate + split share).
// Infeasible split (exceeding a decoder's surrogate common rate) is the
// caller's concern; this evaluates the smooth part only.
double subproblem_objective(const Eigen::MatrixXd& channel,
                            const Eigen::VectorXd& noise_vars,
                            const Eigen::VectorXd& weights,
                            const StreamPlan& plan, const WmmseState& wmmse,
                            const Eigen::MatrixXd& columns,
                            const Eigen::VectorXd& common_split);

// Surrogate common rate of decoder j at fixed WMMSE state; the subproblem
// constrains sum_k c_k by the minimum of these over decoders.
double surrogate_common_rate(const Eigen::MatrixXd& channel,
                             const Eigen::VectorXd& noise_vars,
                             const StreamPlan& plan, const WmmseState& wmmse,
                             const Eigen::MatrixXd& columns, int decoder);

// Euclidean projection onto the L1 ball of the given radius.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

// Called at every accepted iterate of every restart, always with columns
// shaped for the plan the caller passed; the internal warm-start solves an
// RSMA run performs for other plans are not reported.
using IterateObserver =
    std::function<void(const Eigen::MatrixXd& columns,
                       const Eigen::VectorXd& common_split, double wsr)>;

// WSR maximization over the precoder and common split by WMMSE alternating
// optimization with a deterministic restart pool. For RSMA plans the pool
// additionally embeds the converged SDMA and NOMA solutions, so the
// returned WSR dominates both special cases on every instance.
Solution optimize_wsr(const Eigen::MatrixXd& channel,
                      const Eigen::VectorXd& noise_vars,
                      const Eigen::VectorXd& weights, const StreamPlan& plan,
                      double epsilon, const OptimizerConfig& config,
                      const IterateObserver& observer = {});

// Scenario-level convenience: channel matrix and per-user noise variances
// derived from the scenario.
Solution optimize_wsr(const RoomScenario& scenario, const StreamPlan& plan,
                      const Eigen::VectorXd& weights, double epsilon,
                      const OptimizerConfig& config,
                      const IterateObserver& observer = {});

// Per-user normalized noise variances at budget epsilon. Physical noise
// sees the DC operating point: received optical power with every fixture
// biased at the budget, times the conversion factor.
Eigen::VectorXd scenario_noise_vector(const RoomScenario& scenario,
                                      const ChannelMatrix& channel,
                                      double epsilon);

// NOMA decoding order: strongest user by channel row 2-norm, ties broken
// toward the lower index.
int noma_strong_user(const Eigen::MatrixXd& channel);

}  // namespace rsma
