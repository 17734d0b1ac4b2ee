#pragma once

// Parameter sweeps over the extended model: enumerate configurations, compute
// the signed relative error of the closed-form approximation, and aggregate
// histograms globally and per fixed parameter value.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clockaoi/extended_model.hpp"

namespace clockaoi {

/// How the A, B, N ranges of a grid are read.
///   cofactor: A, B, N are the coprime cofactors; periods are A' = A*b*n etc.
///   direct:   A, B, N are the periods A', B', N'; a, b, n filter the derived gcds.
enum class PeriodMode { cofactor, direct };

struct SweepGrid {
  PeriodMode mode = PeriodMode::cofactor;
  std::vector<std::int64_t> A, B, N;
  std::vector<std::int64_t> a, b, n;
  std::vector<std::int64_t> delta_b, delta_n;
  std::vector<Rational> p;

  /// A, B, N in 2..21; a, b, n in 1..11; delta_B, delta_N in 0..20; p in {1/10, 1/2, 1}.
  static SweepGrid defaults();
};

/// Parses a JSON grid document. Every field is optional and falls back to
/// SweepGrid::defaults(). Integer fields accept a scalar, a list, or
/// {"from": x, "to": y, "step": s}; "p" accepts numbers or rational strings.
/// Throws ConfigError on malformed input.
SweepGrid parse_grid(std::string_view json_text);
SweepGrid load_grid(const std::filesystem::path& path);

enum class SweepParameter { A, B, N, a, b, n, delta_b, delta_n, p };
inline constexpr SweepParameter kSweepParameters[] = {
    SweepParameter::A, SweepParameter::B,       SweepParameter::N,       SweepParameter::a, SweepParameter::b,
    SweepParameter::n, SweepParameter::delta_b, SweepParameter::delta_n, SweepParameter::p};

/// Display name ("A", "A'", "delta_B", ...) and a file-safe key ("cofA", "Ap", "dB", ...).
std::string parameter_name(SweepParameter param, PeriodMode mode);
std::string parameter_file_key(SweepParameter param, PeriodMode mode);

struct SweepPoint {
  SystemConfig cfg;
  /// Value of every SweepParameter for this point, as swept.
  std::map<SweepParameter, Rational> coordinates;
};

struct EnumerationStats {
  std::int64_t candidates = 0;
  std::int64_t invalid_decomposition = 0;
  std::int64_t equal_periods = 0;
  std::int64_t emitted = 0;
};

struct Enumeration {
  std::vector<SweepPoint> points;
  EnumerationStats stats;
};

/// Deterministic, duplicate-free. Throws ConfigError if nothing survives.
Enumeration enumerate_configs(const SweepGrid& grid);

/// (exact - approx_center) / exact with the exact value from
/// expected_exact_extended(cfg, tol). Throws std::domain_error if exact is 0.
Rational relative_error(const SystemConfig& cfg, const Rational& tol);

struct Histogram {
  Rational bin_width;
  std::map<std::int64_t, std::int64_t> bins;  // floor(error / bin_width) -> count
  std::int64_t count_total = 0;
  std::int64_t n_skipped = 0;
  double mean = 0;
  double q01 = 0, q50 = 0, q99 = 0;
  /// Per-config errors in enumeration order.
  std::vector<double> raw_errors;

  /// Fraction of raw errors inside [lo, hi].
  double fraction_within(double lo, double hi) const;
};

struct SweepSlice {
  SweepParameter parameter;
  Rational value;
  Histogram histogram;
};

struct SweepOptions {
  /// Tolerance for the truncated expectation, relative to the approximation center.
  Rational tol_relative = make_rational(1, std::int64_t{1} << 40);
  Rational bin_width = make_rational(1, 100);
  unsigned jobs = 1;
};

struct SweepResult {
  SweepGrid grid;
  SweepOptions options;
  EnumerationStats enumeration;
  Histogram global;
  std::vector<SweepSlice> slices;
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;
  /// Configurations whose |error| exceeded rel_error_bound_extended.
  std::int64_t bound_violations = 0;
};

SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& options);

/// File name -> content for every output: hist_all.csv, hist_<key>_<value>.csv,
/// summary.csv, manifest.json.
std::map<std::string, std::string> render_sweep_outputs(const SweepResult& result);
/// Creates dir if needed and writes render_sweep_outputs(result) into it.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace clockaoi
