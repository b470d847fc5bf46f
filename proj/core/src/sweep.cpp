#include "rsma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rsma/scenario_io.hpp"

namespace rsma {

namespace {

struct WorkItem {
  Scheme scheme;
  double snr_db;
  std::optional<double> separation_m;
};

ResultRecord evaluate_point(const SweepSpec& spec, const RoomScenario& base,
                            const Eigen::VectorXd& weights,
                            const WorkItem& item) {
  ResultRecord rec;
  rec.scheme = item.scheme;
  rec.scenario_id = spec.scenario_id;
  rec.snr_db = item.snr_db;
  rec.separation_m = item.separation_m;
  rec.overall_rates = Eigen::VectorXd::Constant(
      weights.size(), std::numeric_limits<double>::quiet_NaN());
  rec.wsr = std::numeric_limits<double>::quiet_NaN();

  try {
    RoomScenario scenario = base;
    if (item.separation_m) {
      const double half = *item.separation_m / 2.0;
      scenario.users[0].position.x() = -half;
      scenario.users[0].position.y() = 0.0;
      scenario.users[1].position.x() = half;
      scenario.users[1].position.y() = 0.0;
    }
    const double epsilon = std::pow(10.0, item.snr_db / 10.0);
    const ChannelMatrix channel = channel_matrix(scenario);
    const Eigen::VectorXd noise =
        scenario_noise_vector(scenario, channel, epsilon);

    StreamPlan plan = StreamPlan::sdma(channel.user_count());
    switch (item.scheme) {
      case Scheme::RSMA:
        plan = StreamPlan::rsma(channel.user_count());
        break;
      case Scheme::SDMA:
        break;
      case Scheme::NOMA:
        plan = StreamPlan::noma(noma_strong_user(channel.gains));
        break;
    }

    const Solution sol = optimize_wsr(channel.gains, noise, weights, plan,
                                      epsilon, spec.optimizer);
    rec.wsr = sol.report.wsr;
    rec.overall_rates = sol.report.overall_rate;
    rec.common_rate = sol.common_split.sum();
    rec.iterations = sol.iterations_used;
    rec.converged = sol.converged;
  } catch (const std::exception&) {
    // Leave the NaN marker; the sweep carries on with the other points.
    rec.converged = false;
  }
  return rec;
}

}  // namespace

void SweepSpec::validate() const {
  if (schemes.empty()) {
    throw std::invalid_argument("SweepSpec: schemes must be non-empty");
  }
  if (snr_points_db.empty()) {
    throw std::invalid_argument("SweepSpec: snr_points_db must be non-empty");
  }
  if (kind == SweepKind::SeparationSweep && separation_points_m.empty()) {
    throw std::invalid_argument(
        "SweepSpec: separation sweep needs separation_points_m");
  }
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("SweepSpec: weights must be nonnegative");
  }
  if (workers < 0) {
    throw std::invalid_argument("SweepSpec: workers must be >= 0");
  }
  optimizer.validate();
}

std::vector<double> default_separation_points() {
  std::vector<double> points;
  for (int i = 0; i * 0.4 <= 5.0 + 1e-9; ++i) {
    points.push_back(i * 0.4);
  }
  return points;
}

int resolve_worker_count(int requested) {
  if (const char* env = std::getenv("RSMA_VLC_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) {
      return static_cast<int>(parsed);
    }
  }
  if (requested >= 1) {
    return requested;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc >= 1 ? static_cast<int>(hc) : 1;
}

std::vector<ResultRecord> run_sweep(const SweepSpec& spec,
                                    const RoomScenario& scenario) {
  spec.validate();
  scenario.validate();
  const int users = static_cast<int>(scenario.users.size());

  Eigen::VectorXd weights = spec.weights;
  if (weights.size() == 0) {
    weights = Eigen::VectorXd::Constant(users, 1.0 / users);
  } else if (weights.size() != users) {
    throw std::invalid_argument("run_sweep: weights length != user count");
  }
  if (spec.kind == SweepKind::SeparationSweep && users != 2) {
    throw std::invalid_argument("run_sweep: separation sweep needs 2 users");
  }
  if (users != 2 &&
      std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::NOMA) !=
          spec.schemes.end()) {
    throw std::invalid_argument("run_sweep: NOMA needs exactly 2 users");
  }

  std::vector<WorkItem> items;
  for (Scheme scheme : spec.schemes) {
    for (double snr : spec.snr_points_db) {
      if (spec.kind == SweepKind::SeparationSweep) {
        for (double sep : spec.separation_points_m) {
          items.push_back({scheme, snr, sep});
        }
      } else {
        items.push_back({scheme, snr, std::nullopt});
      }
    }
  }

  std::vector<ResultRecord> records(items.size());
  const int workers = std::min<int>(resolve_worker_count(spec.workers),
                                    static_cast<int>(items.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      records[i] = evaluate_point(spec, scenario, weights, items[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= items.size()) break;
        records[i] = evaluate_point(spec, scenario, weights, items[i]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const ResultRecord& a, const ResultRecord& b) {
                     if (a.scheme != b.scheme) return a.scheme < b.scheme;
                     if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                     return a.separation_m.value_or(-1.0) <
                            b.separation_m.value_or(-1.0);
                   });
  return records;
}

std::vector<ResultRecord> run_sweep(const SweepSpec& spec) {
  return run_sweep(spec, load_scenario(spec.scenario_file));
}

}  // namespace rsma
