#include "rsma/brute_force.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

// Exhaustive lattice search over precoder rows. Flipping the sign of one
// column in every row leaves all stream SINRs unchanged (gains enter
// squared), so the search fixes a canonical sign pattern: first-row
// entries are nonnegative, and a second-row entry is nonnegative wherever
// the first row holds a zero. This prunes mirrored candidates without
// excluding any achievable rate point.

namespace rsma {

namespace {

constexpr int kMaxStreams = 3;

struct Row {
  std::array<double, kMaxStreams> value{};  // scaled by the grid step
  unsigned zero_mask = 0;                   // bit per stream with value 0
  unsigned negative_mask = 0;               // bit per stream with value < 0
};

void enumerate_rows(int streams, int budget, double step,
                    const std::vector<char>& pinned, bool nonnegative,
                    std::vector<Row>& out) {
  std::array<int, kMaxStreams> lattice{};
  auto emit = [&]() {
    Row row;
    for (int s = 0; s < streams; ++s) {
      row.value[s] = lattice[s] * step;
      if (lattice[s] == 0) row.zero_mask |= 1u << s;
      if (lattice[s] < 0) row.negative_mask |= 1u << s;
    }
    out.push_back(row);
  };
  auto recurse = [&](auto&& self, int s, int remaining) -> void {
    if (s == streams) {
      emit();
      return;
    }
    if (pinned[s]) {
      lattice[s] = 0;
      self(self, s + 1, remaining);
      return;
    }
    const int lo = nonnegative ? 0 : -remaining;
    for (int a = lo; a <= remaining; ++a) {
      lattice[s] = a;
      self(self, s + 1, remaining - std::abs(a));
    }
  };
  recurse(recurse, 0, budget);
}

}  // namespace

Solution brute_force_wsr(const Eigen::MatrixXd& channel,
                         const Eigen::VectorXd& noise_vars,
                         const Eigen::VectorXd& weights,
                         const StreamPlan& plan, double epsilon,
                         double grid_resolution) {
  const int users = plan.user_count();
  const int leds = static_cast<int>(channel.cols());
  const int streams = plan.stream_count();
  if (leds > 2 || streams > kMaxStreams) {
    throw std::invalid_argument(
        "brute_force_wsr: instance too large (at most 2 fixtures, 3 streams)");
  }
  if (channel.rows() != users || noise_vars.size() != users ||
      weights.size() != users) {
    throw std::invalid_argument("brute_force_wsr: dimension mismatch");
  }
  if (!(epsilon > 0.0) || !(grid_resolution > 0.0)) {
    throw std::invalid_argument(
        "brute_force_wsr: epsilon and grid_resolution must be > 0");
  }
  if (!(noise_vars.array() > 0.0).all()) {
    throw std::domain_error("brute_force_wsr: noise variances must be > 0");
  }

  int budget = static_cast<int>(std::floor(epsilon / grid_resolution + 1e-9));
  while (budget > 0 && budget * grid_resolution > epsilon) --budget;

  std::vector<char> pinned(streams, 0);
  for (int s : plan.pinned_zero_streams()) pinned[s] = 1;

  const int sc = plan.common_stream_index();
  std::vector<int> decoders;
  if (sc >= 0) decoders = plan.streams()[sc].decoded_by;

  int split_user = -1;
  double split_weight = 0.0;
  for (int k : plan.common_rate_users()) {
    if (split_user < 0 || weights(k) > weights(split_user)) split_user = k;
  }
  if (split_user >= 0) split_weight = weights(split_user);

  std::vector<Row> first;
  enumerate_rows(streams, budget, grid_resolution, pinned, true, first);
  std::vector<Row> second;
  if (leds == 2) {
    enumerate_rows(streams, budget, grid_resolution, pinned, false, second);
  } else {
    second.push_back(Row{});  // single-fixture: virtual all-zero second row
  }

  const double log2_scale = 1.0 / std::log(2.0);
  double best_wsr = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_columns = Eigen::MatrixXd::Zero(leds, streams);

  // users <= streams (one private each), so kMaxStreams bounds both.
  std::array<std::array<double, kMaxStreams>, kMaxStreams> partial{};
  std::array<std::array<double, kMaxStreams>, kMaxStreams> v{};
  std::array<double, kMaxStreams> totals{};
  for (const Row& r1 : first) {
    for (int k = 0; k < users; ++k) {
      for (int s = 0; s < streams; ++s) {
        partial[k][s] = channel(k, 0) * r1.value[s];
      }
    }
    for (const Row& r2 : second) {
      if (r2.negative_mask & r1.zero_mask) continue;  // mirrored duplicate

      for (int k = 0; k < users; ++k) {
        if (leds == 2) {
          for (int s = 0; s < streams; ++s) {
            v[k][s] = partial[k][s] + channel(k, 1) * r2.value[s];
          }
        } else {
          v[k] = partial[k];
        }
      }

      double wsr = 0.0;
      for (int k = 0; k < users; ++k) {
        double total = noise_vars(k);
        for (int u = 0; u < users; ++u) {
          const double x = v[k][u];  // private stream of user u
          total += x * x;
        }
        totals[k] = total;
        const double own = v[k][k];
        const double own2 = own * own;
        wsr += weights(k) * std::log1p(own2 / (total - own2)) * log2_scale;
      }
      if (sc >= 0 && split_user >= 0) {
        double common_rate = std::numeric_limits<double>::infinity();
        for (int k : decoders) {
          const double vc = v[k][sc];
          common_rate = std::min(common_rate,
                                 std::log1p(vc * vc / totals[k]) * log2_scale);
        }
        wsr += split_weight * common_rate;
      }

      if (wsr > best_wsr) {
        best_wsr = wsr;
        for (int s = 0; s < streams; ++s) {
          best_columns(0, s) = r1.value[s];
          if (leds == 2) best_columns(1, s) = r2.value[s];
        }
      }
    }
  }

  Eigen::VectorXd split = Eigen::VectorXd::Zero(users);
  const Precoder precoder = Precoder::from_budget(best_columns, epsilon);
  if (sc >= 0 && split_user >= 0) {
    RateReport probe = rate_report(channel, plan, precoder, split, weights,
                                   noise_vars);
    split(split_user) = probe.achievable_common_rate;
  }

  Solution out;
  out.precoder = precoder;
  out.common_split = split;
  out.report = rate_report(channel, plan, precoder, split, weights, noise_vars);
  out.iterations_used = 0;
  out.converged = true;
  out.wsr_trace = {out.report.wsr};
  return out;
}

Solution brute_force_wsr(const RoomScenario& scenario, const StreamPlan& plan,
                         const Eigen::VectorXd& weights, double epsilon,
                         double grid_resolution) {
  const ChannelMatrix channel = channel_matrix(scenario);
  const Eigen::VectorXd noise =
      scenario_noise_vector(scenario, channel, epsilon);
  return brute_force_wsr(channel.gains, noise, weights, plan, epsilon,
                         grid_resolution);
}

}  // namespace rsma
