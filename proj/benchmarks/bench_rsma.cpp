#include <string>

#include <benchmark/benchmark.h>

#include "rsma/brute_force.hpp"
#include "rsma/geometry.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/scenario_io.hpp"
#include "rsma/streams.hpp"

namespace {

using namespace rsma;

const std::string kDir = RSMA_VLC_SCENARIO_DIR;

RoomScenario scenario_2led() {
  static const RoomScenario sc = load_scenario(kDir + "/scenario1_2led.json");
  return sc;
}

RoomScenario scenario_4led() {
  static const RoomScenario sc = load_scenario(kDir + "/scenario1_4led.json");
  return sc;
}

void BM_ChannelMatrix(benchmark::State& state) {
  const RoomScenario sc = scenario_4led();
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel_matrix(sc));
  }
}
BENCHMARK(BM_ChannelMatrix);

void BM_RateReport(benchmark::State& state) {
  const RoomScenario sc = scenario_2led();
  const ChannelMatrix channel = channel_matrix(sc);
  const auto plan = StreamPlan::rsma(2);
  const double eps = 100.0;
  Eigen::MatrixXd cols = Eigen::MatrixXd::Constant(2, 3, eps / 3.0);
  const auto precoder = Precoder::from_budget(cols, eps);
  const auto weights = Eigen::VectorXd::Constant(2, 0.5);
  const auto noise = Eigen::VectorXd::Ones(2);
  const auto split = Eigen::VectorXd::Zero(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rate_report(channel.gains, plan, precoder, split, weights, noise));
  }
}
BENCHMARK(BM_RateReport);

void BM_AoStep(benchmark::State& state) {
  const RoomScenario sc = scenario_2led();
  const ChannelMatrix channel = channel_matrix(sc);
  const double eps = 100.0;
  const auto plan = StreamPlan::rsma(2);
  const auto weights = Eigen::VectorXd::Constant(2, 0.5);
  const auto noise = scenario_noise_vector(sc, channel, eps);
  const Eigen::MatrixXd init = Eigen::MatrixXd::Constant(2, 3, eps / 3.0);
  for (auto _ : state) {
    state.PauseTiming();
    AoState st = make_ao_state(channel.gains, noise, weights, plan, eps,
                               SubproblemConfig{}, init);
    state.ResumeTiming();
    benchmark::DoNotOptimize(ao_step(st));
  }
}
BENCHMARK(BM_AoStep);

void BM_OptimizeWsr(benchmark::State& state) {
  const RoomScenario sc = scenario_2led();
  const ChannelMatrix channel = channel_matrix(sc);
  const double eps = 100.0;  // 20 dB against unit noise
  const auto weights = Eigen::VectorXd::Constant(2, 0.5);
  const auto noise = scenario_noise_vector(sc, channel, eps);
  OptimizerConfig config;
  config.rng_seed = 7;
  const auto plan = StreamPlan::rsma(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        optimize_wsr(channel.gains, noise, weights, plan, eps, config));
  }
}
BENCHMARK(BM_OptimizeWsr)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const RoomScenario sc = scenario_2led();
  const ChannelMatrix channel = channel_matrix(sc);
  const double eps = 10.0;
  const auto weights = Eigen::VectorXd::Constant(2, 0.5);
  const auto noise = scenario_noise_vector(sc, channel, eps);
  const auto plan = StreamPlan::sdma(2);
  const double grid = state.range(0) / 100.0 * eps;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        brute_force_wsr(channel.gains, noise, weights, plan, eps, grid));
  }
}
BENCHMARK(BM_BruteForce)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
