#pragma once

// Extended model: one-slot generation and transmission delays, phase shifts
// delta_B / delta_N of the generator and network schedules, and Bernoulli(p)
// transmission success.

#include <cstdint>
#include <optional>
#include <string>

#include "clockaoi/basic_model.hpp"
#include "clockaoi/rational.hpp"

namespace clockaoi {

enum class Model { basic, extended };

std::string to_string(Model m);
/// "basic" or "extended"; throws ConfigError otherwise.
Model parse_model(const std::string& name);

struct SystemConfig {
  PeriodDecomposition periods;
  std::int64_t delta_b = 0;
  std::int64_t delta_n = 0;
  Rational success_probability = 1;
  Model model = Model::basic;
};

SystemConfig make_basic_config(const PeriodDecomposition& d);
/// Throws ConfigError for negative shifts or p outside (0, 1].
SystemConfig make_extended_config(const PeriodDecomposition& d, std::int64_t delta_b, std::int64_t delta_n,
                                  const Rational& p);
/// Re-checks every SystemConfig invariant; throws ConfigError.
void validate(const SystemConfig& cfg);

/// Truncated geometric-weighted expectation. The true value lies in
/// [value, value + tail_bound].
struct GeometricExpectation {
  Rational value;
  Rational tail_bound;
  std::int64_t terms_used = 0;
};

/// AoI at cycle k assuming exactly the latest l transmissions failed and the
/// one before succeeded:
///   2 + lN' + (kA'-dN-1) mod N' + [(kA'-dB-2-lN') mod B' - (kA'-dN-1) mod N'] mod B'
std::int64_t aoi_conditional(const SystemConfig& cfg, std::int64_t k, std::int64_t l);

std::int64_t c_extended(const SystemConfig& cfg, std::int64_t i, std::int64_t j, std::int64_t l);

/// Union over i, j of <c_extended(i, j, l), ab, B>.
AoiDistribution distribution_conditional(const SystemConfig& cfg, std::int64_t l);

/// Mean of distribution_conditional(cfg, l), computed without materializing
/// the multiset.
Rational conditional_mean(const SystemConfig& cfg, std::int64_t l);

/// K = 2 + (delta_N + 1) compmod n.
std::int64_t freshness_offset_K(const SystemConfig& cfg);

/// (B'+N'-n)/2 + K + ((1-p)/p) N'  +-  ab/2.
BandedValue expected_approx_extended(const SystemConfig& cfg);

/// sum_l p (1-p)^l mean_k(aoi_conditional(k, l)), truncated at the first L for
/// which the tail bound drops below tol.
GeometricExpectation expected_exact_extended(const SystemConfig& cfg, const Rational& tol);

/// The same expectation without truncation. mean^[l] - lN' is periodic in l
/// with period ab, so the series sums to
///   N'(1-p)/p + p/(1-(1-p)^ab) * sum_{s<ab} (1-p)^s (mean^[s] - sN').
Rational expected_exact_extended_closed(const SystemConfig& cfg);

/// ab / ((B-1)ab + n(aN-1) + 2(K + ((1-p)/p) N')).
Rational rel_error_bound_extended(const SystemConfig& cfg);

/// B'+N'-n + K + N' * ceil(ln(1-sigma)/ln(1-p) - 1), never below the
/// real-valued expression. For p = 1 the retransmission term is zero.
std::int64_t max_bound_prob(const SystemConfig& cfg, const Rational& sigma);

/// B'+N'-n + K: the largest value of the l = 0 conditional sequence is bounded by this.
std::int64_t max_bound_extended_deterministic(const SystemConfig& cfg);

}  // namespace clockaoi
