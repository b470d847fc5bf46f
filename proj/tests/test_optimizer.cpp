#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rsma/optimizer.hpp"

using namespace rsma;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

struct Instance {
  Eigen::MatrixXd channel;
  Eigen::VectorXd noise;
  Eigen::VectorXd weights;
  StreamPlan plan;
  double epsilon = 0.0;
};

// small random 2-user instances across all three schemes and both solvers'
// typical operating range
Instance random_instance(std::mt19937_64& rng, int index) {
  std::uniform_real_distribution<double> gain(0.005, 0.06);
  std::uniform_real_distribution<double> eps(2.0, 300.0);
  std::uniform_real_distribution<double> wdist(0.1, 1.0);
  Instance ins;
  const int leds = 2 + static_cast<int>(rng() % 2);  // 2 or 3 fixtures
  ins.channel.resize(2, leds);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < leds; ++l) ins.channel(k, l) = gain(rng);
  ins.noise = vec2(1.0, 1.0);
  const double w0 = wdist(rng);
  ins.weights = vec2(w0, 1.0 - w0 * 0.5);
  ins.epsilon = eps(rng);
  switch (index % 3) {
    case 0: ins.plan = StreamPlan::sdma(2); break;
    case 1: ins.plan = StreamPlan::noma(noma_strong_user(ins.channel)); break;
    default: ins.plan = StreamPlan::rsma(2); break;
  }
  return ins;
}

OptimizerConfig quick_config() {
  OptimizerConfig cfg;
  cfg.max_iterations = 60;
  cfg.restarts = 3;
  cfg.rng_seed = 311;
  return cfg;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.rel_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("noma strong user by row norm with ties toward user zero") {
  Eigen::MatrixXd H(2, 2);
  H << 1.0, 0.0,
       3.0, 4.0;
  CHECK(noma_strong_user(H) == 1);
  H << 3.0, 4.0,
       1.0, 0.0;
  CHECK(noma_strong_user(H) == 0);
  H << 2.0, 1.0,
       1.0, 2.0;  // equal norms
  CHECK(noma_strong_user(H) == 0);
}

TEST_CASE("single user, single fixture: budget saturates, rate closed form") {
  Eigen::MatrixXd H(1, 1);
  H << 0.04;
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 1.0);
  const double eps = 50.0;
  const auto sol = optimize_wsr(H, noise, w, StreamPlan::sdma(1), eps,
                                quick_config());
  CHECK(sol.converged);
  CHECK(std::abs(sol.precoder.columns(0, 0)) == doctest::Approx(eps).epsilon(1e-6));
  const double v = eps * 0.04;
  CHECK(sol.report.wsr ==
        doctest::Approx(std::log2(1.0 + v * v)).epsilon(1e-9));
}

TEST_CASE("wsr trace is non-decreasing on 120 randomized instances") {
  std::mt19937_64 rng(424242);
  OptimizerConfig cfg = quick_config();
  cfg.max_iterations = 40;
  cfg.restarts = 2;
  for (int i = 0; i < 120; ++i) {
    const auto ins = random_instance(rng, i);
    const auto sol = optimize_wsr(ins.channel, ins.noise, ins.weights,
                                  ins.plan, ins.epsilon, cfg);
    REQUIRE(!sol.wsr_trace.empty());
    for (std::size_t t = 1; t < sol.wsr_trace.size(); ++t) {
      CHECK(sol.wsr_trace[t] >= sol.wsr_trace[t - 1] - 1e-9);
    }
    CHECK(sol.report.wsr == doctest::Approx(sol.wsr_trace.back()));
    CHECK(sol.report.wsr >= 0.0);
  }
}

TEST_CASE("every observed iterate is feasible") {
  std::mt19937_64 rng(7171);
  OptimizerConfig cfg = quick_config();
  for (int i = 0; i < 12; ++i) {
    const auto ins = random_instance(rng, i);
    int calls = 0;
    const auto observer = [&](const Eigen::MatrixXd& columns,
                              const Eigen::VectorXd& split, double wsr) {
      ++calls;
      for (int l = 0; l < columns.rows(); ++l) {
        CHECK(columns.row(l).lpNorm<1>() <= ins.epsilon + 1e-9);
      }
      CHECK(split.minCoeff() >= 0.0);
      for (int s : ins.plan.pinned_zero_streams()) {
        CHECK(columns.col(s).cwiseAbs().maxCoeff() == 0.0);
      }
      if (ins.plan.has_common()) {
        // the split may never exceed what the common stream can carry
        const auto r = rate_report(
            ins.channel, ins.plan,
            Precoder::from_budget(columns, ins.epsilon), split, ins.weights,
            ins.noise);
        CHECK(split.sum() <= r.achievable_common_rate + 1e-6);
        CHECK_FALSE(r.split_clipped);
      }
      CHECK(wsr >= -1e-12);
    };
    optimize_wsr(ins.channel, ins.noise, ins.weights, ins.plan, ins.epsilon,
                 cfg, observer);
    CHECK(calls > 0);
  }
}

TEST_CASE("fixed rng seed reproduces the solution bit for bit") {
  std::mt19937_64 rng(999);
  const auto ins = random_instance(rng, 2);  // RSMA
  const auto a = optimize_wsr(ins.channel, ins.noise, ins.weights, ins.plan,
                              ins.epsilon, quick_config());
  const auto b = optimize_wsr(ins.channel, ins.noise, ins.weights, ins.plan,
                              ins.epsilon, quick_config());
  CHECK(a.report.wsr == b.report.wsr);
  CHECK((a.precoder.columns - b.precoder.columns).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.common_split - b.common_split).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.wsr_trace == b.wsr_trace);
}

TEST_CASE("user permutation: wsr invariant, per-user quantities permuted") {
  Eigen::MatrixXd H(2, 2);
  H << 0.041, 0.012,
       0.019, 0.027;  // deliberately asymmetric
  const auto weights = vec2(0.7, 0.3);
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(2);
  Eigen::MatrixXd Hp(2, 2);
  Hp.row(0) = H.row(1);
  Hp.row(1) = H.row(0);
  const auto wp = vec2(0.3, 0.7);

  OptimizerConfig cfg = quick_config();
  cfg.max_iterations = 120;

  SUBCASE("sdma") {
    const auto a = optimize_wsr(H, noise, weights, StreamPlan::sdma(2), 40.0, cfg);
    const auto b = optimize_wsr(Hp, noise, wp, StreamPlan::sdma(2), 40.0, cfg);
    CHECK(a.report.wsr == doctest::Approx(b.report.wsr).epsilon(1e-6));
    CHECK(a.report.overall_rate(0) ==
          doctest::Approx(b.report.overall_rate(1)).epsilon(1e-5));
    CHECK(a.report.overall_rate(1) ==
          doctest::Approx(b.report.overall_rate(0)).epsilon(1e-5));
  }
  SUBCASE("rsma") {
    const auto a = optimize_wsr(H, noise, weights, StreamPlan::rsma(2), 40.0, cfg);
    const auto b = optimize_wsr(Hp, noise, wp, StreamPlan::rsma(2), 40.0, cfg);
    CHECK(a.report.wsr == doctest::Approx(b.report.wsr).epsilon(1e-6));
    CHECK(a.report.overall_rate(0) ==
          doctest::Approx(b.report.overall_rate(1)).epsilon(1e-5));
  }
  SUBCASE("noma strong user follows the permutation") {
    const auto a = optimize_wsr(H, noise, weights,
                                StreamPlan::noma(noma_strong_user(H)), 40.0, cfg);
    const auto b = optimize_wsr(Hp, noise, wp,
                                StreamPlan::noma(noma_strong_user(Hp)), 40.0, cfg);
    CHECK(noma_strong_user(H) == 0);
    CHECK(noma_strong_user(Hp) == 1);
    CHECK(a.report.wsr == doctest::Approx(b.report.wsr).epsilon(1e-6));
  }
}

TEST_CASE("rsma dominates both special cases on random instances") {
  std::mt19937_64 rng(2025);
  OptimizerConfig cfg = quick_config();
  for (int i = 0; i < 20; ++i) {
    auto ins = random_instance(rng, 0);
    const auto sdma = optimize_wsr(ins.channel, ins.noise, ins.weights,
                                   StreamPlan::sdma(2), ins.epsilon, cfg);
    const auto noma = optimize_wsr(ins.channel, ins.noise, ins.weights,
                                   StreamPlan::noma(noma_strong_user(ins.channel)),
                                   ins.epsilon, cfg);
    const auto rsma = optimize_wsr(ins.channel, ins.noise, ins.weights,
                                   StreamPlan::rsma(2), ins.epsilon, cfg);
    CHECK(rsma.report.wsr >= sdma.report.wsr - 1e-6);
    CHECK(rsma.report.wsr >= noma.report.wsr - 1e-6);
  }
}

TEST_CASE("iteration cap returns the best iterate flagged, not an error") {
  Eigen::MatrixXd H(2, 2);
  H << 0.033, 0.011,
       0.011, 0.033;
  OptimizerConfig cfg = quick_config();
  cfg.max_iterations = 1;
  const auto sol = optimize_wsr(H, Eigen::VectorXd::Ones(2), vec2(0.5, 0.5),
                                StreamPlan::rsma(2), 100.0, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.report.wsr > 0.0);
  CHECK(check_feasible(sol.precoder));
}

TEST_CASE("ao step does not decrease the surrogate and fixes its fixed point") {
  Eigen::MatrixXd H(1, 1);
  H << 0.05;
  SubproblemConfig sub;
  auto st = make_ao_state(H, Eigen::VectorXd::Ones(1),
                          Eigen::VectorXd::Constant(1, 1.0),
                          StreamPlan::sdma(1), 30.0, sub,
                          Eigen::MatrixXd::Constant(1, 1, 30.0));
  double last = -1e300;
  for (int i = 0; i < 30; ++i) {
    st = ao_step(std::move(st));
    CHECK(st.surrogate >= last - 1e-9);
    last = st.surrogate;
  }
  // converged single-user state: another step moves nothing
  const Eigen::MatrixXd before = st.columns;
  st = ao_step(std::move(st));
  CHECK((st.columns - before).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("equalizer update beats any scalar on a grid") {
  // e(g) = g^2 T - 2 g v + 1 with T = v^2 + sigma^2
  const double v = 0.8, sigma2 = 1.3;
  const double T = v * v + sigma2;
  const double g_star = mmse_equalizer(v, sigma2);
  const auto mse = [&](double g) { return g * g * T - 2.0 * g * v + 1.0; };
  for (int i = 0; i <= 1000; ++i) {
    const double g = -2.0 + 4.0 * i / 1000.0;
    CHECK(mse(g_star) <= mse(g) + 1e-12);
  }
}

TEST_CASE("scenario noise vector: unit mode gives ones") {
  RoomScenario sc;
  LedFixture f;
  f.position = {0.0, 0.0, 4.0};
  sc.fixtures = {f};
  PhotoDetector pd1, pd2;
  pd1.position = {0.5, 0.0, 0.8};
  pd2.position = {-0.5, 0.0, 0.8};
  sc.users = {pd1, pd2};
  const auto H = channel_matrix(sc);
  const auto nv = scenario_noise_vector(sc, H, 100.0);
  CHECK(nv.size() == 2);
  CHECK(nv(0) == 1.0);
  CHECK(nv(1) == 1.0);
}

}  // TEST_SUITE
