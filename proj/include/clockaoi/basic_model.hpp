#pragma once

// Basic model: all periods start at slot 0, generation and transmission are
// instantaneous and every transmission succeeds.

#include <cstdint>
#include <string>
#include <vector>

#include "clockaoi/modmath.hpp"
#include "clockaoi/rational.hpp"

namespace clockaoi {

/// The three periods and their factorization
///   A' = A*b*n,  B' = B*b*a,  N' = N*n*a
/// with a = gcd(B', N'), b = gcd(A', B'), n = gcd(A', N').
struct PeriodDecomposition {
  std::int64_t processing_period = 1;    // A'
  std::int64_t generation_period = 1;    // B'
  std::int64_t network_period = 1;       // N'
  std::int64_t processing_cofactor = 1;  // A
  std::int64_t generation_cofactor = 1;  // B
  std::int64_t network_cofactor = 1;     // N
  std::int64_t gcd_gen_net = 1;          // a
  std::int64_t gcd_proc_gen = 1;         // b
  std::int64_t gcd_proc_net = 1;         // n

  /// Period of the AoI sequence in processing cycles, a*B*N.
  std::int64_t cycle_period() const;

  friend bool operator==(const PeriodDecomposition&, const PeriodDecomposition&) = default;
};

/// Throws ConfigError if a period is not positive or all three share a divisor.
PeriodDecomposition decompose(std::int64_t processing_period, std::int64_t generation_period,
                              std::int64_t network_period);

/// Multiset of AoI values over one period of the sequence, together with the
/// arithmetic progressions it was assembled from (empty for empirical data).
struct AoiDistribution {
  Multiset values;
  std::int64_t period = 0;
  std::vector<ArithmeticProgression> progressions;

  Rational mean() const;
};

/// center +- half_width, i.e. the closed interval [center - hw, center + hw].
struct BandedValue {
  Rational center;
  Rational half_width;

  Rational lower() const { return center - half_width; }
  Rational upper() const { return center + half_width; }
  bool contains(const Rational& x) const { return lower() <= x && x <= upper(); }
};

/// AoI at the start of processing cycle k:
///   kA' mod N' + (kA' mod B' - kA' mod N') mod B'
std::int64_t aoi_basic(const PeriodDecomposition& d, std::int64_t k);

/// Starting value of the (i, j)-th progression, i in [0, a), j in [0, N).
std::int64_t c_basic(const PeriodDecomposition& d, std::int64_t i, std::int64_t j);

/// Union over i, j of <c_basic(i, j), ab, B>. Cardinality a*B*N.
AoiDistribution distribution_basic(const PeriodDecomposition& d);

/// Closed-form mean of the sequence, exact.
Rational expected_exact_basic(const PeriodDecomposition& d);

/// (B' + N' - n)/2 +- ab/2.
BandedValue expected_approx_basic(const PeriodDecomposition& d);

/// ab / ((B-1)ab + n(aN-1)). Throws UnboundedError when B = 1 and aN = 1,
/// where the sequence is identically zero.
Rational rel_error_bound_basic(const PeriodDecomposition& d);

/// B' + N' - n.
std::int64_t max_bound_basic(const PeriodDecomposition& d);

}  // namespace clockaoi
