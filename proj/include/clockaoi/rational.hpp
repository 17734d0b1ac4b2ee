#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace clockaoi {

/// Exact rational number. Always kept in canonical form.
using Rational = mpq_class;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// Largest integer <= q. Throws std::overflow_error outside int64.
std::int64_t floor_of(const Rational& q);
/// Smallest integer >= q. Throws std::overflow_error outside int64.
std::int64_t ceil_of(const Rational& q);

/// "num/den", e.g. "7/1", "-1/20".
std::string to_fraction_string(const Rational& q);
double to_double(const Rational& q);

/// Accepts integers ("3"), fractions ("1/3"), and plain or scientific
/// decimals ("0.25", "1e-3"). Decimals are converted exactly.
Rational parse_rational(std::string_view text);

}  // namespace clockaoi
