// clockaoi: analyze, simulate, verify and sweep clocked AoI systems.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "clockaoi/commands.hpp"
#include "clockaoi/errors.hpp"
#include "clockaoi/simulator.hpp"
#include "clockaoi/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void add_config_flags(CLI::App* cmd, clockaoi::ConfigArgs& args) {
  cmd->add_option("--a-period", args.a_period, "Processing period A' of agent A")->required();
  cmd->add_option("--b-period", args.b_period, "Generation period B' of agent B")->required();
  cmd->add_option("--n-period", args.n_period, "Transmission period N' of the network")->required();
  cmd->add_option("--delta-b", args.delta_b, "Phase shift of the generator (extended model)");
  cmd->add_option("--delta-n", args.delta_n, "Phase shift of the network (extended model)");
  cmd->add_option("--p", args.p, "Transmission success probability, e.g. 0.5 or 1/3 (extended model)");
  cmd->add_option("--model", args.model, "basic or extended")->check(CLI::IsMember({"basic", "extended"}));
}

int cmd_analyze(const clockaoi::ConfigArgs& args, const std::optional<std::string>& sigma_text) {
  const auto cfg = clockaoi::build_config(args);
  std::optional<clockaoi::Rational> sigma;
  if (sigma_text) {
    try {
      sigma = clockaoi::parse_rational(*sigma_text);
    } catch (const std::exception& e) {
      throw clockaoi::ConfigError(std::string("--sigma: ") + e.what());
    }
    if (cfg.model != clockaoi::Model::extended) throw clockaoi::ConfigError("--sigma requires --model extended");
    if (*sigma <= 0 || *sigma >= 1) throw clockaoi::ConfigError("--sigma must lie in (0, 1)");
  }
  std::cout << clockaoi::analyze_report(cfg, sigma).dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const clockaoi::ConfigArgs& args, std::int64_t cycles, std::uint64_t seed) {
  const auto cfg = clockaoi::build_config(args);
  if (cycles < 1) throw clockaoi::ConfigError("--cycles must be at least 1");
  const auto trace = cfg.model == clockaoi::Model::basic
                         ? clockaoi::simulate_basic(cfg.periods, cycles)
                         : clockaoi::simulate_extended(cfg, cycles, clockaoi::RngSpec{seed, "mt19937_64"});
  clockaoi::write_trace_csv(std::cout, trace);

  const auto warm = static_cast<std::int64_t>(trace.warm_up_length());
  if (warm < cycles) {
    const auto window = cycles - warm;
    const auto dist = clockaoi::empirical_distribution(trace, warm, window);
    std::cerr << fmt::format("mean={} ({:.6f}) max={} warm_up={} samples={}\n",
                             clockaoi::to_fraction_string(dist.mean()), clockaoi::to_double(dist.mean()),
                             dist.values.max(), warm, window);
  } else {
    std::cerr << fmt::format("mean=undefined max=undefined warm_up={} samples=0\n", warm);
  }
  return kExitOk;
}

int cmd_verify(const clockaoi::ConfigArgs& args, const clockaoi::VerifyOptions& options) {
  const auto cfg = clockaoi::build_config(args);
  if (options.l_max < 0) throw clockaoi::ConfigError("--l-max must be nonnegative");
  if (options.cycles < 0) throw clockaoi::ConfigError("--cycles must be nonnegative");
  const auto checks = clockaoi::run_verify(cfg, options);
  bool all = true;
  for (const auto& c : checks) {
    std::cout << fmt::format("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    all = all && c.passed;
  }
  return all ? kExitOk : kExitRuntime;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_dir, const std::string& bin_width,
              const std::string& tol, int jobs) {
  clockaoi::SweepOptions options;
  try {
    options.bin_width = clockaoi::parse_rational(bin_width);
    options.tol_relative = clockaoi::parse_rational(tol);
  } catch (const std::exception& e) {
    throw clockaoi::ConfigError(e.what());
  }
  if (options.bin_width <= 0) throw clockaoi::ConfigError("--bin-width must be positive");
  if (options.tol_relative <= 0) throw clockaoi::ConfigError("--tol must be positive");
  if (jobs < 1) throw clockaoi::ConfigError("--jobs must be at least 1");
  options.jobs = jobs;

  const auto grid = clockaoi::load_grid(grid_path);
  const auto result = clockaoi::run_sweep(grid, options);
  clockaoi::write_sweep_outputs(result, out_dir);
  std::cerr << fmt::format("evaluated={} skipped={} mean={:.6f} bound_violations={}\n", result.evaluated,
                           result.skipped, result.global.mean, result.bound_violations);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age of information in clocked two-agent systems"};
  app.require_subcommand(1);

  clockaoi::ConfigArgs analyze_args, simulate_args, verify_args;

  auto* analyze = app.add_subcommand("analyze", "Print the analytic report for one configuration as JSON");
  add_config_flags(analyze, analyze_args);
  std::optional<std::string> sigma;
  analyze->add_option("--sigma", sigma, "Confidence level for the probabilistic maximum (extended model)");

  auto* simulate = app.add_subcommand("simulate", "Simulate a configuration and write the trace as CSV");
  add_config_flags(simulate, simulate_args);
  std::int64_t sim_cycles = 0;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--cycles", sim_cycles, "Number of processing cycles")->required();
  simulate->add_option("--seed", sim_seed, "Seed of the transmission-success stream")->required();

  auto* verify = app.add_subcommand("verify", "Check the closed forms against brute force and the simulator");
  add_config_flags(verify, verify_args);
  clockaoi::VerifyOptions verify_options;
  verify->add_option("--l-max", verify_options.l_max, "Largest failure count l to check")->capture_default_str();
  verify->add_option("--cycles", verify_options.cycles, "Simulated cycles (0 picks a default)");
  verify->add_option("--seed", verify_options.rng.seed, "Seed of the transmission-success stream")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Relative approximation error over a grid of configurations");
  std::string grid_path, out_dir, bin_width = "1/100", tol = "1/1099511627776";
  int jobs = 1;
  sweep->add_option("--grid", grid_path, "Grid description (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--bin-width", bin_width, "Histogram bin width")->capture_default_str();
  sweep->add_option("--tol", tol, "Relative truncation tolerance of the extended expectation")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_args, sigma);
    if (*simulate) return cmd_simulate(simulate_args, sim_cycles, sim_seed);
    if (*verify) return cmd_verify(verify_args, verify_options);
    if (*sweep) return cmd_sweep(grid_path, out_dir, bin_width, tol, jobs);
  } catch (const clockaoi::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
