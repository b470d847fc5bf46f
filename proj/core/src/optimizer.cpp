#include "rsma/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsma/noise.hpp"

namespace rsma {

namespace {

// Deterministic sub-seeding. Random restart columns are keyed by the bytes
// of the channel row they serve, so relabeling users permutes the restart
// pool instead of reshuffling it; row scales are keyed by the row index,
// which user permutations leave alone.
std::uint64_t splitmix_round(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = splitmix_round(seed);
  s = splitmix_round(s ^ a);
  s = splitmix_round(s ^ b);
  return s;
}

std::uint64_t fnv1a_bytes(const Eigen::VectorXd& v) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double x = v(i);
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Start {
  Eigen::MatrixXd columns;
  Eigen::VectorXd split;  // may be empty: start from zero split
};

void pin_columns(const StreamPlan& plan, Eigen::MatrixXd& columns) {
  for (int s : plan.pinned_zero_streams()) columns.col(s).setZero();
}

Eigen::MatrixXd channel_matched_start(const Eigen::MatrixXd& channel,
                                      const StreamPlan& plan, double epsilon) {
  const int leds = static_cast<int>(channel.cols());
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(leds, plan.stream_count());
  for (int k = 0; k < plan.user_count(); ++k) {
    cols.col(plan.private_stream_index(k)) = channel.row(k).transpose();
  }
  const int sc = plan.common_stream_index();
  if (sc >= 0) {
    cols.col(sc) = channel.colwise().sum().transpose();
  }
  pin_columns(plan, cols);
  double max_row = 0.0;
  for (int l = 0; l < leds; ++l) {
    max_row = std::max(max_row, cols.row(l).lpNorm<1>());
  }
  if (max_row > 0.0) cols *= epsilon / max_row;
  return cols;
}

Eigen::MatrixXd uniform_start(const StreamPlan& plan, int leds,
                              double epsilon) {
  Eigen::MatrixXd cols = Eigen::MatrixXd::Constant(
      leds, plan.stream_count(), epsilon / plan.stream_count());
  pin_columns(plan, cols);
  return cols;
}

// Private beams along each channel's residual against the other user's
// channel: the interference-nulling basin SDMA needs at high SNR. Two
// users only. with_common additionally points the common stream at the
// channel sum, which seeds the superposition corner for plans that
// carry a common stream.
Eigen::MatrixXd zero_forcing_start(const Eigen::MatrixXd& channel,
                                   const StreamPlan& plan, double epsilon,
                                   bool with_common) {
  const int leds = static_cast<int>(channel.cols());
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(leds, plan.stream_count());
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd own = channel.row(k).transpose();
    const Eigen::VectorXd other = channel.row(1 - k).transpose();
    const double denom = other.squaredNorm();
    Eigen::VectorXd residual = own;
    if (denom > 0.0) {
      residual -= (own.dot(other) / denom) * other;
    }
    cols.col(plan.private_stream_index(k)) = residual;
  }
  const int sc = plan.common_stream_index();
  if (with_common && sc >= 0) {
    cols.col(sc) = channel.colwise().sum().transpose();
  }
  pin_columns(plan, cols);
  double max_row = 0.0;
  for (int l = 0; l < leds; ++l) {
    max_row = std::max(max_row, cols.row(l).lpNorm<1>());
  }
  if (max_row > 0.0) cols *= epsilon / max_row;
  return cols;
}

Eigen::MatrixXd random_start(const Eigen::MatrixXd& channel,
                             const StreamPlan& plan, double epsilon,
                             std::uint64_t seed, int restart) {
  const int leds = static_cast<int>(channel.cols());
  Eigen::MatrixXd cols(leds, plan.stream_count());
  for (int s = 0; s < plan.stream_count(); ++s) {
    Eigen::VectorXd key;
    if (plan.streams()[s].is_common) {
      key = channel.colwise().sum().transpose();
    } else {
      key = channel.row(plan.streams()[s].owner).transpose();
    }
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(restart),
                                 fnv1a_bytes(key)));
    for (int l = 0; l < leds; ++l) {
      cols(l, s) = 2.0 * unit_interval(rng) - 1.0;
    }
  }
  pin_columns(plan, cols);
  for (int l = 0; l < leds; ++l) {
    const double row_l1 = cols.row(l).lpNorm<1>();
    if (row_l1 == 0.0) continue;
    std::mt19937_64 rng(mix_seed(seed ^ 0x726f77ULL,
                                 static_cast<std::uint64_t>(restart),
                                 static_cast<std::uint64_t>(l) + 1));
    const double fill = 0.5 + 0.5 * unit_interval(rng);
    cols.row(l) *= fill * epsilon / row_l1;
  }
  return cols;
}

void update_wmmse(AoState& st) {
  const int users = st.plan.user_count();
  const int sc = st.plan.common_stream_index();
  const Eigen::MatrixXd v = st.channel * st.columns;

  st.wmmse.private_g.resize(users);
  st.wmmse.private_u.resize(users);
  st.wmmse.common_g = Eigen::VectorXd::Zero(users);
  st.wmmse.common_u = Eigen::VectorXd::Ones(users);

  for (int k = 0; k < users; ++k) {
    double total = st.noise_vars(k);
    for (int u = 0; u < users; ++u) {
      const double x = v(k, st.plan.private_stream_index(u));
      total += x * x;
    }
    const double own = v(k, st.plan.private_stream_index(k));
    st.wmmse.private_g(k) = own / total;
    const double mse = std::max(1.0 - own * own / total, 1e-300);
    st.wmmse.private_u(k) = 1.0 / mse;

    if (sc >= 0) {
      const double vc = v(k, sc);
      const double ctotal = vc * vc + total;
      st.wmmse.common_g(k) = vc / ctotal;
      const double cmse = std::max(1.0 - vc * vc / ctotal, 1e-300);
      st.wmmse.common_u(k) = 1.0 / cmse;
    }
  }
}

double surrogate_wsr(const AoState& st) {
  return -subproblem_objective(st.channel, st.noise_vars, st.weights, st.plan,
                               st.wmmse, st.columns, st.common_split);
}

struct RestartResult {
  Eigen::MatrixXd columns;
  Eigen::VectorXd split;
  RateReport report;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

RestartResult run_restart(const Eigen::MatrixXd& channel,
                          const Eigen::VectorXd& noise_vars,
                          const Eigen::VectorXd& weights,
                          const StreamPlan& plan, double epsilon,
                          const OptimizerConfig& config, const Start& start,
                          const IterateObserver& observer) {
  AoState state = make_ao_state(channel, noise_vars, weights, plan, epsilon,
                                config.subproblem, start.columns);
  if (start.split.size() > 0) {
    // rate_report clips an overdrawn split; adopt the clipped value so the
    // state is consistent before the first step.
    const RateReport seeded =
        rate_report(channel, plan, Precoder::from_budget(state.columns, epsilon),
                    start.split, weights, noise_vars);
    state.common_split = seeded.common_split;
    state.surrogate = surrogate_wsr(state);
  }

  RestartResult res;
  res.report =
      rate_report(channel, plan, Precoder::from_budget(state.columns, epsilon),
                  state.common_split, weights, noise_vars);
  res.trace.push_back(res.report.wsr);
  if (observer) observer(state.columns, state.common_split, res.report.wsr);

  for (int it = 1; it <= config.max_iterations; ++it) {
    res.iterations = it;
    AoState previous = state;
    state = ao_step(std::move(state));
    const RateReport report =
        rate_report(channel, plan, Precoder::from_budget(state.columns, epsilon),
                    state.common_split, weights, noise_vars);
    if (report.wsr < res.trace.back()) {
      // Numerical floor: the exact step cannot decrease the rate, so a dip
      // is rounding noise. Keep the incumbent and stop.
      state = std::move(previous);
      res.trace.push_back(res.trace.back());
      if (observer) observer(state.columns, state.common_split, res.trace.back());
      res.converged = true;
      break;
    }
    const double delta = report.wsr - res.trace.back();
    res.trace.push_back(report.wsr);
    res.report = report;
    if (observer) observer(state.columns, state.common_split, report.wsr);
    if (delta <= config.rel_tolerance * std::max(1.0, std::abs(report.wsr))) {
      res.converged = true;
      break;
    }
  }

  res.columns = state.columns;
  res.split = state.common_split;
  return res;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("OptimizerConfig: max_iterations must be >= 1");
  }
  if (!(rel_tolerance > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: rel_tolerance must be > 0");
  }
  if (restarts < 1) {
    throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
  }
  if (!(subproblem.inner_tolerance > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: inner_tolerance must be > 0");
  }
  if (subproblem.max_inner_iterations < 1) {
    throw std::invalid_argument("OptimizerConfig: max_inner_iterations must be >= 1");
  }
  if (subproblem.max_alm_rounds < 1) {
    throw std::invalid_argument("OptimizerConfig: max_alm_rounds must be >= 1");
  }
  if (!(subproblem.alm_initial_penalty > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: alm_initial_penalty must be > 0");
  }
  if (!(subproblem.admm_step > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: admm_step must be > 0");
  }
}

int noma_strong_user(const Eigen::MatrixXd& channel) {
  if (channel.rows() != 2) {
    throw std::invalid_argument("noma_strong_user: exactly 2 users required");
  }
  return channel.row(0).norm() >= channel.row(1).norm() ? 0 : 1;
}

AoState make_ao_state(const Eigen::MatrixXd& channel,
                      const Eigen::VectorXd& noise_vars,
                      const Eigen::VectorXd& weights, const StreamPlan& plan,
                      double epsilon, const SubproblemConfig& subconfig,
                      const Eigen::MatrixXd& initial_columns) {
  if (channel.rows() != plan.user_count()) {
    throw std::invalid_argument("make_ao_state: channel rows != plan users");
  }
  if (initial_columns.rows() != channel.cols() ||
      initial_columns.cols() != plan.stream_count()) {
    throw std::invalid_argument("make_ao_state: initial precoder shape mismatch");
  }
  if (noise_vars.size() != plan.user_count() ||
      weights.size() != plan.user_count()) {
    throw std::invalid_argument("make_ao_state: per-user vector length mismatch");
  }
  if (!(noise_vars.array() > 0.0).all()) {
    throw std::domain_error("make_ao_state: noise variances must be > 0");
  }
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("make_ao_state: weights must be nonnegative");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("make_ao_state: epsilon must be > 0");
  }

  AoState st;
  st.channel = channel;
  st.noise_vars = noise_vars;
  st.weights = weights;
  st.plan = plan;
  st.epsilon = epsilon;
  st.subproblem = subconfig;
  st.columns = initial_columns;
  pin_columns(plan, st.columns);
  for (Eigen::Index l = 0; l < st.columns.rows(); ++l) {
    Eigen::VectorXd row = st.columns.row(l).transpose();
    if (row.lpNorm<1>() > epsilon) {
      st.columns.row(l) = project_l1_ball(row, epsilon).transpose();
    }
  }
  pin_columns(plan, st.columns);
  st.common_split = Eigen::VectorXd::Zero(plan.user_count());
  update_wmmse(st);
  st.surrogate = surrogate_wsr(st);
  return st;
}

AoState ao_step(AoState state) {
  update_wmmse(state);
  const double incumbent = surrogate_wsr(state);
  const SubproblemResult res = solve_precoder_subproblem(
      state.channel, state.noise_vars, state.weights, state.plan, state.wmmse,
      state.epsilon, state.subproblem, state.columns, state.common_split);
  const double candidate = -res.objective;
  if (candidate >= incumbent) {
    state.columns = res.columns;
    state.common_split = res.common_split;
    state.surrogate = candidate;
  } else {
    state.surrogate = incumbent;
  }
  return state;
}

Solution optimize_wsr(const Eigen::MatrixXd& channel,
                      const Eigen::VectorXd& noise_vars,
                      const Eigen::VectorXd& weights, const StreamPlan& plan,
                      double epsilon, const OptimizerConfig& config,
                      const IterateObserver& observer) {
  config.validate();
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("optimize_wsr: epsilon must be > 0");
  }
  if (channel.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("optimize_wsr: channel matrix is all zero");
  }

  const int leds = static_cast<int>(channel.cols());
  std::vector<Start> starts;
  starts.push_back({channel_matched_start(channel, plan, epsilon), {}});
  if (config.restarts >= 2) {
    starts.push_back({uniform_start(plan, leds, epsilon), {}});
  }
  for (int r = 2; r < config.restarts; ++r) {
    starts.push_back({random_start(channel, plan, epsilon, config.rng_seed, r), {}});
  }
  if (plan.user_count() == 2) {
    const bool has_common = plan.common_stream_index() >= 0;
    for (const bool with_common : {false, true}) {
      if (with_common && !has_common) break;
      Eigen::MatrixXd cols =
          zero_forcing_start(channel, plan, epsilon, with_common);
      if (cols.cwiseAbs().maxCoeff() > 0.0) {
        starts.push_back({std::move(cols), {}});
      }
    }
  }

  if (plan.scheme() == Scheme::RSMA) {
    // Embedding the converged special cases makes the dominance
    // RSMA >= max(SDMA, NOMA) structural: the pool starts where they
    // finished and AO never goes downhill.
    // The embedded solves run unobserved: their iterates belong to other
    // stream plans and would hand the observer columns of the wrong shape.
    const Solution sdma =
        optimize_wsr(channel, noise_vars, weights,
                     StreamPlan::sdma(plan.user_count()), epsilon, config);
    Eigen::MatrixXd embedded =
        Eigen::MatrixXd::Zero(leds, plan.stream_count());
    embedded.leftCols(plan.user_count()) = sdma.precoder.columns;
    starts.push_back({std::move(embedded), {}});

    if (plan.user_count() == 2) {
      const Solution noma = optimize_wsr(
          channel, noise_vars, weights,
          StreamPlan::noma(noma_strong_user(channel)), epsilon, config);
      starts.push_back({noma.precoder.columns, noma.common_split});
    }
  }

  int best = -1;
  RestartResult best_result;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    RestartResult res = run_restart(channel, noise_vars, weights, plan,
                                    epsilon, config, starts[i], observer);
    if (best < 0 || res.report.wsr > best_result.report.wsr) {
      best = static_cast<int>(i);
      best_result = std::move(res);
    }
  }

  Solution out;
  out.precoder = Precoder::from_budget(best_result.columns, epsilon);
  out.common_split = best_result.split;
  out.report = best_result.report;
  out.iterations_used = best_result.iterations;
  out.converged = best_result.converged;
  out.wsr_trace = std::move(best_result.trace);
  return out;
}

Solution optimize_wsr(const RoomScenario& scenario, const StreamPlan& plan,
                      const Eigen::VectorXd& weights, double epsilon,
                      const OptimizerConfig& config,
                      const IterateObserver& observer) {
  const ChannelMatrix channel = channel_matrix(scenario);
  const Eigen::VectorXd noise = scenario_noise_vector(scenario, channel, epsilon);
  return optimize_wsr(channel.gains, noise, weights, plan, epsilon, config,
                      observer);
}

Eigen::VectorXd scenario_noise_vector(const RoomScenario& scenario,
                                      const ChannelMatrix& channel,
                                      double epsilon) {
  const int users = channel.user_count();
  Eigen::VectorXd noise(users);
  for (int k = 0; k < users; ++k) {
    const double received = scenario.conversion_factor * epsilon *
                            channel.gains.row(k).sum();
    noise(k) = normalized_variance(scenario, k, received);
  }
  return noise;
}

}  // namespace rsma
