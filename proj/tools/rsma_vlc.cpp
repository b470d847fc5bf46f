// Command-line front end: run sweep specs, validate scenario files, and
// cross-check the optimizer against the exhaustive reference.
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsma/brute_force.hpp"
#include "rsma/errors.hpp"
#include "rsma/geometry.hpp"
#include "rsma/optimizer.hpp"
#include "rsma/scenario_io.hpp"
#include "rsma/streams.hpp"
#include "rsma/sweep.hpp"

namespace fs = std::filesystem;
using namespace rsma;

namespace {

Scheme scheme_from_flag(const std::string& name) {
  if (name == "RSMA") return Scheme::RSMA;
  if (name == "NOMA") return Scheme::NOMA;
  if (name == "SDMA") return Scheme::SDMA;
  throw std::invalid_argument("unknown scheme: " + name +
                              " (expected RSMA, NOMA, or SDMA)");
}

int run_command(const std::string& spec_path, const std::string& out_dir) {
  const SweepSpec spec = load_sweep_spec(spec_path);

  // claim the output directory before burning minutes on the sweep
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + out_dir + ": " +
                  ec.message());
  }

  const auto records = run_sweep(spec);
  const fs::path csv = fs::path(out_dir) / "results.csv";
  const fs::path plot = fs::path(out_dir) / "plot_results.py";
  write_results(records, csv.string());
  emit_plot_script(records, plot.string());

  int failed = 0;
  for (const auto& r : records) {
    if (!std::isfinite(r.wsr)) ++failed;
  }
  std::printf("%zu records -> %s\n", records.size(), csv.string().c_str());
  std::printf("plot script -> %s\n", plot.string().c_str());
  if (failed > 0) {
    std::printf("warning: %d point(s) failed and carry NaN markers\n", failed);
  }
  return 0;
}

int validate_command(const std::string& scenario_path) {
  const RoomScenario scenario = load_scenario(scenario_path);
  scenario.validate();
  const ChannelMatrix channel = channel_matrix(scenario);
  std::printf("%s: ok\n", scenario_path.c_str());
  std::printf("  fixtures: %d, users: %d\n", channel.fixture_count(),
              channel.user_count());
  std::printf("  gain range: [%.6g, %.6g] (x%g conversion)\n",
              channel.gains.minCoeff(), channel.gains.maxCoeff(),
              scenario.conversion_factor);
  for (int k = 0; k < channel.user_count(); ++k) {
    if ((channel.gains.row(k).array() == 0.0).all()) {
      std::printf("  warning: user %d sees no fixture at all\n", k + 1);
    }
  }
  return 0;
}

int oracle_command(const std::string& scenario_path, double epsilon,
                   double grid_step, const std::vector<std::string>& schemes) {
  const RoomScenario scenario = load_scenario(scenario_path);
  const ChannelMatrix channel = channel_matrix(scenario);
  if (grid_step <= 0.0) grid_step = 0.05 * epsilon;
  const Eigen::VectorXd weights = Eigen::VectorXd::Constant(
      channel.user_count(), 1.0 / channel.user_count());
  const Eigen::VectorXd noise =
      scenario_noise_vector(scenario, channel, epsilon);
  OptimizerConfig config;
  config.rng_seed = 7;

  std::printf("epsilon %.6g, grid step %.6g\n", epsilon, grid_step);
  std::printf("%-6s %14s %14s %10s\n", "scheme", "exhaustive", "optimizer",
              "gap");
  for (const std::string& name : schemes) {
    const Scheme scheme = scheme_from_flag(name);
    StreamPlan plan = StreamPlan::sdma(channel.user_count());
    if (scheme == Scheme::RSMA) plan = StreamPlan::rsma(channel.user_count());
    if (scheme == Scheme::NOMA)
      plan = StreamPlan::noma(noma_strong_user(channel.gains));

    const Solution bf = brute_force_wsr(channel.gains, noise, weights, plan,
                                        epsilon, grid_step);
    const Solution ao =
        optimize_wsr(channel.gains, noise, weights, plan, epsilon, config);
    const double gap =
        bf.report.wsr > 0.0
            ? (ao.report.wsr - bf.report.wsr) / bf.report.wsr
            : 0.0;
    std::printf("%-6s %14.9g %14.9g %9.4f%%\n", name.c_str(), bf.report.wsr,
                ao.report.wsr, gap * 100.0);
  }
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Weighted sum rate experiments for multi-user LED downlinks"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run a sweep spec and write CSV");
  run->add_option("--spec", spec_path, "sweep spec file")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  std::string scenario_path;
  auto* validate =
      app.add_subcommand("validate", "check a scenario file and its channel");
  validate->add_option("--scenario", scenario_path, "scenario file")
      ->required();

  std::string oracle_scenario;
  double epsilon = 10.0;
  double grid_step = 0.0;  // 0: derive as 0.05 * epsilon
  std::vector<std::string> schemes{"RSMA", "NOMA", "SDMA"};
  auto* oracle = app.add_subcommand(
      "oracle", "compare the optimizer against the exhaustive lattice");
  oracle->add_option("--scenario", oracle_scenario, "scenario file")
      ->required();
  oracle->add_option("--epsilon", epsilon, "amplitude budget");
  oracle->add_option("--grid-step", grid_step,
                     "lattice resolution (default 0.05 * epsilon)");
  oracle->add_option("--schemes", schemes, "subset of RSMA NOMA SDMA");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return guarded([&] { return run_command(spec_path, out_dir); });
  }
  if (validate->parsed()) {
    return guarded([&] { return validate_command(scenario_path); });
  }
  return guarded([&] {
    return oracle_command(oracle_scenario, epsilon, grid_step, schemes);
  });
}
