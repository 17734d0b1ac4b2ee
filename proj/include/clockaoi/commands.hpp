#pragma once

// Library side of the command-line tool. Every value the CLI prints comes
// from these functions so that tests can check them without a subprocess.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockaoi/extended_model.hpp"
#include "clockaoi/simulator.hpp"

namespace clockaoi {

struct ConfigArgs {
  std::int64_t a_period = 0;
  std::int64_t b_period = 0;
  std::int64_t n_period = 0;
  std::int64_t delta_b = 0;
  std::int64_t delta_n = 0;
  std::string p = "1";
  std::string model = "basic";
};

/// Throws ConfigError naming the violated constraint.
SystemConfig build_config(const ConfigArgs& args);

/// Analysis report as JSON. Rationals appear twice: "<field>" holds "num/den"
/// and "<field>_float" the nearest double.
nlohmann::json analyze_report(const SystemConfig& cfg, const std::optional<Rational>& sigma,
                              const Rational& tol = make_rational(1, std::int64_t{1} << 40));

struct CheckResult {
  std::string name;
  bool passed = true;
  /// First counterexample on failure, a short summary otherwise.
  std::string detail;
};

struct VerifyOptions {
  std::int64_t l_max = 3;
  /// Simulated cycles; 0 picks max(10 * aBN, 10000) plus warm-up.
  std::int64_t cycles = 0;
  RngSpec rng{1, "mt19937_64"};
  /// Test hook: shifts every analytic progression start. Never set by the CLI.
  std::int64_t corrupt_offset = 0;
};

std::vector<CheckResult> run_verify(const SystemConfig& cfg, const VerifyOptions& options);

}  // namespace clockaoi
