#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rsma/optimizer.hpp"

// Convex subproblem at fixed equalizers g and MSE weights u. With
// v_{k,s} = h_k' p_s, the per-stream MSE e = g^2 T - 2 g v + 1 (T the
// stage's total received power including noise) is a convex quadratic in
// the precoder, and the surrogate rate (1 + ln u - u e) / ln 2 touches
// log2(1 + SINR) from below exactly at u = 1/mse. Minimized here:
//   F(P, c) = -sum_k w_k ((1 + ln u_k - u_k e_k)/ln2 + c_k)
// over per-row L1 balls, c >= 0 on the scheme's allowed users, and
// sum_k c_k <= surrogate common rate of every decoder. The coupled rate
// constraints go into an augmented Lagrangian; each round minimizes the
// smooth augmented objective over the projectable set.

namespace rsma {

namespace {

const double kLn2 = std::log(2.0);

struct Workspace {
  const Eigen::MatrixXd& channel;
  const Eigen::VectorXd& noise;
  const Eigen::VectorXd& weights;
  const StreamPlan& plan;
  const WmmseState& wmmse;
  double epsilon;

  int users;
  int leds;
  int streams;
  int common;                    // stream index, -1 without one
  std::vector<int> decoders;     // users decoding the common stream
  std::vector<char> pinned;      // per-stream zero-power mask
  std::vector<char> allowed;     // per-user common-split mask

  Eigen::MatrixXd v;             // K x S stream gains, refreshed per point

  Workspace(const Eigen::MatrixXd& channel_, const Eigen::VectorXd& noise_,
            const Eigen::VectorXd& weights_, const StreamPlan& plan_,
            const WmmseState& wmmse_, double epsilon_)
      : channel(channel_), noise(noise_), weights(weights_), plan(plan_),
        wmmse(wmmse_), epsilon(epsilon_),
        users(plan_.user_count()), leds(static_cast<int>(channel_.cols())),
        streams(plan_.stream_count()), common(plan_.common_stream_index()),
        pinned(streams, 0), allowed(users, 0) {
    if (common >= 0) {
      decoders = plan_.streams()[common].decoded_by;
    }
    for (int s : plan_.pinned_zero_streams()) pinned[s] = 1;
    for (int k : plan_.common_rate_users()) allowed[k] = 1;
    v.resize(users, streams);
  }

  void refresh(const Eigen::MatrixXd& columns) { v = channel * columns; }

  double private_total(int k) const {
    double t = noise(k);
    for (int u = 0; u < users; ++u) {
      const double x = v(k, plan.private_stream_index(u));
      t += x * x;
    }
    return t;
  }

  double private_mse(int k) const {
    const double g = wmmse.private_g(k);
    return g * g * private_total(k) - 2.0 * g * v(k, plan.private_stream_index(k)) + 1.0;
  }

  double common_mse(int j) const {
    const double g = wmmse.common_g(j);
    const double vc = v(j, common);
    return g * g * (vc * vc + private_total(j)) - 2.0 * g * vc + 1.0;
  }

  double surrogate_private_rate(int k) const {
    const double u = wmmse.private_u(k);
    return (1.0 + std::log(u) - u * private_mse(k)) / kLn2;
  }

  double surrogate_common(int j) const {
    const double u = wmmse.common_u(j);
    return (1.0 + std::log(u) - u * common_mse(j)) / kLn2;
  }

  // Smooth objective: -sum w (surrogate private rate + split).
  double smooth(const Eigen::VectorXd& split) const {
    double f = 0.0;
    for (int k = 0; k < users; ++k) {
      f -= weights(k) * (surrogate_private_rate(k) + split(k));
    }
    return f;
  }

  // d smooth / d columns at the refreshed point, plus the split part.
  void smooth_grad(Eigen::MatrixXd& gp, Eigen::VectorXd& gc) const {
    gp.setZero(leds, streams);
    gc.setZero(users);
    Eigen::VectorXd coeff(streams);
    for (int k = 0; k < users; ++k) {
      const double g = wmmse.private_g(k);
      const double scale = weights(k) * wmmse.private_u(k) / kLn2;
      coeff.setZero();
      for (int u = 0; u < users; ++u) {
        const int s = plan.private_stream_index(u);
        coeff(s) = scale * 2.0 * g * g * v(k, s);
      }
      coeff(plan.private_stream_index(k)) -= scale * 2.0 * g;
      gp.noalias() += channel.row(k).transpose() * coeff.transpose();
      gc(k) = -weights(k);
    }
  }

  // Adds mu_j * d(sum c - surrogate common rate_j)/d columns for one decoder.
  void constraint_grad_add(int j, double mu, Eigen::MatrixXd& gp) const {
    const double g = wmmse.common_g(j);
    const double scale = mu * wmmse.common_u(j) / kLn2;
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(streams);
    for (int u = 0; u < users; ++u) {
      const int s = plan.private_stream_index(u);
      coeff(s) = scale * 2.0 * g * g * v(j, s);
    }
    coeff(common) = scale * (2.0 * g * g * v(j, common) - 2.0 * g);
    gp.noalias() += channel.row(j).transpose() * coeff.transpose();
  }
};

// One flat variable vector: the L*S column entries then the K splits.
struct Point {
  Eigen::MatrixXd columns;
  Eigen::VectorXd split;
};

void project(const Workspace& w, Point& x) {
  for (int s = 0; s < w.streams; ++s) {
    if (w.pinned[s]) x.columns.col(s).setZero();
  }
  for (int l = 0; l < w.leds; ++l) {
    Eigen::VectorXd row = x.columns.row(l).transpose();
    if (row.lpNorm<1>() > w.epsilon) {
      x.columns.row(l) = project_l1_ball(row, w.epsilon).transpose();
      for (int s = 0; s < w.streams; ++s) {
        if (w.pinned[s]) x.columns(l, s) = 0.0;
      }
    }
  }
  for (int k = 0; k < w.users; ++k) {
    x.split(k) = w.allowed[k] ? std::max(0.0, x.split(k)) : 0.0;
  }
}

struct AugmentedState {
  Eigen::VectorXd lambda;  // one multiplier per decoder
  double rho = 1.0;
};

double augmented_value(Workspace& w, const AugmentedState& alm,
                       const Point& x) {
  w.refresh(x.columns);
  double f = w.smooth(x.split);
  const double total = x.split.sum();
  for (std::size_t j = 0; j < w.decoders.size(); ++j) {
    const double gap = total - w.surrogate_common(w.decoders[j]);
    const double shifted = std::max(0.0, alm.lambda(j) + alm.rho * gap);
    f += (shifted * shifted - alm.lambda(j) * alm.lambda(j)) / (2.0 * alm.rho);
  }
  return f;
}

void augmented_grad(Workspace& w, const AugmentedState& alm, const Point& x,
                    Eigen::MatrixXd& gp, Eigen::VectorXd& gc) {
  w.refresh(x.columns);
  w.smooth_grad(gp, gc);
  const double total = x.split.sum();
  for (std::size_t j = 0; j < w.decoders.size(); ++j) {
    const int decoder = w.decoders[j];
    const double gap = total - w.surrogate_common(decoder);
    const double mu = std::max(0.0, alm.lambda(j) + alm.rho * gap);
    if (mu == 0.0) continue;
    w.constraint_grad_add(decoder, mu, gp);
    for (int k = 0; k < w.users; ++k) gc(k) += mu;
  }
}

double dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
           const Eigen::VectorXd& av, const Eigen::VectorXd& bv) {
  return (a.array() * b.array()).sum() + av.dot(bv);
}

double norm2(const Eigen::MatrixXd& a, const Eigen::VectorXd& av) {
  return a.squaredNorm() + av.squaredNorm();
}

struct InnerOutcome {
  bool converged = false;
  int iterations = 0;
};

InnerOutcome projected_gradient(Workspace& w, const AugmentedState& alm,
                                const SubproblemConfig& cfg, Point& x) {
  project(w, x);
  double f = augmented_value(w, alm, x);
  Eigen::MatrixXd gp;
  Eigen::VectorXd gc;
  augmented_grad(w, alm, x, gp, gc);

  double step = 1.0;
  InnerOutcome out;
  for (int it = 0; it < cfg.max_inner_iterations; ++it) {
    ++out.iterations;
    Point next;
    double fn = 0.0;
    bool accepted = false;
    while (step > 1e-18) {
      next.columns = x.columns - step * gp;
      next.split = x.split - step * gc;
      project(w, next);
      const Eigen::MatrixXd dp = next.columns - x.columns;
      const Eigen::VectorXd dc = next.split - x.split;
      const double move = norm2(dp, dc);
      if (move == 0.0) {
        out.converged = true;  // stationary under projection
        return out;
      }
      fn = augmented_value(w, alm, next);
      const double model = f + dot(gp, dp, gc, dc) + move / (2.0 * step);
      if (fn <= model + 1e-12 * std::max(1.0, std::abs(f))) {
        const bool small_move =
            std::sqrt(move) <=
            cfg.inner_tolerance * std::max(1.0, std::sqrt(norm2(x.columns, x.split)));
        x = std::move(next);
        const double drop = f - fn;
        f = fn;
        accepted = true;
        if (small_move &&
            drop <= cfg.inner_tolerance * std::max(1.0, std::abs(f))) {
          out.converged = true;
          return out;
        }
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // step collapsed, no further progress possible
      return out;
    }
    augmented_grad(w, alm, x, gp, gc);
    step = std::min(step * 1.3, 1e6);
  }
  return out;
}

InnerOutcome admm(Workspace& w, const AugmentedState& alm,
                  const SubproblemConfig& cfg, Point& z) {
  project(w, z);
  const double tau = cfg.admm_step;
  Point x = z;
  Point dual{Eigen::MatrixXd::Zero(w.leds, w.streams),
             Eigen::VectorXd::Zero(w.users)};
  Eigen::MatrixXd gp;
  Eigen::VectorXd gc;

  InnerOutcome out;
  for (int it = 0; it < cfg.max_inner_iterations; ++it) {
    ++out.iterations;
    // x-step: a few descent iterations on the smooth augmented objective
    // plus the proximity term; exactness is not required for progress.
    Point anchor{z.columns - dual.columns, z.split - dual.split};
    double step = 1.0 / tau;
    for (int sub = 0; sub < 20; ++sub) {
      augmented_grad(w, alm, x, gp, gc);
      gp += tau * (x.columns - anchor.columns);
      gc += tau * (x.split - anchor.split);
      const double fx = augmented_value(w, alm, x) +
                        0.5 * tau * (norm2(x.columns - anchor.columns,
                                           x.split - anchor.split));
      bool moved = false;
      while (step > 1e-18) {
        Point trial{x.columns - step * gp, x.split - step * gc};
        const double ft = augmented_value(w, alm, trial) +
                          0.5 * tau * (norm2(trial.columns - anchor.columns,
                                             trial.split - anchor.split));
        if (ft <= fx - 0.25 * step * norm2(gp, gc)) {
          x = std::move(trial);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved || norm2(gp, gc) < 1e-20) break;
      step = std::min(step * 1.5, 1e6 / tau);
    }

    Point prev_z = z;
    z.columns = x.columns + dual.columns;
    z.split = x.split + dual.split;
    project(w, z);
    dual.columns += x.columns - z.columns;
    dual.split += x.split - z.split;

    const double primal = std::sqrt(norm2(x.columns - z.columns, x.split - z.split));
    const double shift = tau * std::sqrt(norm2(z.columns - prev_z.columns,
                                               z.split - prev_z.split));
    const double scale = std::max(1.0, std::sqrt(norm2(z.columns, z.split)));
    if (primal <= cfg.inner_tolerance * scale &&
        shift <= cfg.inner_tolerance * scale) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (radius < 0.0) {
    throw std::domain_error("project_l1_ball: radius must be >= 0");
  }
  if (v.lpNorm<1>() <= radius) return v;
  const Eigen::Index n = v.size();
  std::vector<double> mags(n);
  for (Eigen::Index i = 0; i < n; ++i) mags[i] = std::abs(v(i));
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += mags[i];
    const double candidate = (cumulative - radius) / static_cast<double>(i + 1);
    if (i + 1 == n || mags[i + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(v(i)) - theta;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

double subproblem_objective(const Eigen::MatrixXd& channel,
                            const Eigen::VectorXd& noise_vars,
                            const Eigen::VectorXd& weights,
                            const StreamPlan& plan, const WmmseState& wmmse,
                            const Eigen::MatrixXd& columns,
                            const Eigen::VectorXd& common_split) {
  Workspace w(channel, noise_vars, weights, plan, wmmse, 0.0);
  w.refresh(columns);
  return w.smooth(common_split);
}

double surrogate_common_rate(const Eigen::MatrixXd& channel,
                             const Eigen::VectorXd& noise_vars,
                             const StreamPlan& plan, const WmmseState& wmmse,
                             const Eigen::MatrixXd& columns, int decoder) {
  if (plan.common_stream_index() < 0) {
    throw std::invalid_argument("surrogate_common_rate: plan has no common stream");
  }
  Workspace w(channel, noise_vars, Eigen::VectorXd::Zero(plan.user_count()),
              plan, wmmse, 0.0);
  w.refresh(columns);
  return w.surrogate_common(decoder);
}

SubproblemResult solve_precoder_subproblem(
    const Eigen::MatrixXd& channel, const Eigen::VectorXd& noise_vars,
    const Eigen::VectorXd& weights, const StreamPlan& plan,
    const WmmseState& wmmse, double epsilon, const SubproblemConfig& config,
    const Eigen::MatrixXd& warm_columns, const Eigen::VectorXd& warm_split) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("solve_precoder_subproblem: epsilon must be > 0");
  }
  Workspace w(channel, noise_vars, weights, plan, wmmse, epsilon);

  Point x{warm_columns, warm_split};
  project(w, x);

  const bool coupled = w.common >= 0 && !w.decoders.empty();
  AugmentedState alm;
  alm.lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.decoders.size()));
  alm.rho = config.alm_initial_penalty;

  SubproblemResult result;
  bool inner_ok = false;
  double prev_violation = std::numeric_limits<double>::infinity();
  const int rounds = coupled ? config.max_alm_rounds : 1;
  for (int round = 0; round < rounds; ++round) {
    const InnerOutcome inner =
        config.solver == SubproblemSolver::Admm
            ? admm(w, alm, config, x)
            : projected_gradient(w, alm, config, x);
    result.inner_iterations += inner.iterations;
    inner_ok = inner.converged;
    if (!coupled) break;

    w.refresh(x.columns);
    const double total = x.split.sum();
    double violation = 0.0;
    double magnitude = 1.0;
    for (std::size_t j = 0; j < w.decoders.size(); ++j) {
      const double rate = w.surrogate_common(w.decoders[j]);
      const double gap = total - rate;
      violation = std::max(violation, gap);
      magnitude = std::max(magnitude, std::abs(rate));
    }
    if (violation <= 1e-8 * magnitude) break;
    for (std::size_t j = 0; j < w.decoders.size(); ++j) {
      const double gap = total - w.surrogate_common(w.decoders[j]);
      alm.lambda(j) = std::max(0.0, alm.lambda(j) + alm.rho * gap);
    }
    if (violation > 0.25 * prev_violation) {
      alm.rho = std::min(alm.rho * 4.0, 1e8);
    }
    prev_violation = violation;
  }

  // The split enters the objective linearly, so its optimum given the
  // precoder is exact: the whole surrogate common rate goes to the allowed
  // user with the largest weight (ties toward the lower index).
  x.split.setZero();
  if (coupled && !plan.common_rate_users().empty()) {
    w.refresh(x.columns);
    double budget = std::numeric_limits<double>::infinity();
    for (int j : w.decoders) {
      budget = std::min(budget, w.surrogate_common(j));
    }
    budget = std::max(0.0, budget) * (1.0 - 1e-12);
    int target = plan.common_rate_users().front();
    for (int k : plan.common_rate_users()) {
      if (weights(k) > weights(target)) target = k;
    }
    x.split(target) = budget;
  }

  w.refresh(x.columns);
  result.columns = std::move(x.columns);
  result.common_split = std::move(x.split);
  result.objective = w.smooth(result.common_split);
  result.converged = inner_ok;
  return result;
}

}  // namespace rsma
