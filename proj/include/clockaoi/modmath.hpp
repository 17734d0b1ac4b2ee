#pragma once

// Integer and residue-class primitives shared by the analytic models.
//
// All moduli follow the floored convention: the result of x mod y carries the
// sign of the divisor, so it lies in [0, y) for every integer x, including
// negative operands.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace clockaoi {

std::int64_t checked_add(std::int64_t x, std::int64_t y);
std::int64_t checked_sub(std::int64_t x, std::int64_t y);
std::int64_t checked_mul(std::int64_t x, std::int64_t y);

/// x - floor(x/y)*y. Throws std::domain_error for y <= 0.
std::int64_t floor_mod(std::int64_t x, std::int64_t y);

/// Complement modulus ceil(x/y)*y - x: distance from x up to the next
/// multiple of y. Equals floor_mod(-x, y).
std::int64_t comp_mod(std::int64_t x, std::int64_t y);

std::int64_t floor_div(std::int64_t x, std::int64_t y);
std::int64_t ceil_div(std::int64_t x, std::int64_t y);

/// The set {start, start+step, ..., start+(count-1)*step}.
struct ArithmeticProgression {
  std::int64_t start = 0;
  std::int64_t step = 1;
  std::int64_t count = 1;

  ArithmeticProgression() = default;
  /// Throws std::invalid_argument unless start >= 0, step >= 1, count >= 1.
  ArithmeticProgression(std::int64_t start, std::int64_t step, std::int64_t count);

  std::int64_t last() const { return start + (count - 1) * step; }
  std::vector<std::int64_t> elements() const;

  friend bool operator==(const ArithmeticProgression&, const ArithmeticProgression&) = default;
};

/// Integer multiset. Union adds multiplicities.
class Multiset {
public:
  using Entries = std::map<std::int64_t, std::int64_t>;

  Multiset() = default;

  void add(std::int64_t value, std::int64_t multiplicity = 1);
  void add(const ArithmeticProgression& progression);
  Multiset& operator+=(const Multiset& other);

  std::int64_t total() const { return total_; }
  std::int64_t count(std::int64_t value) const;
  bool empty() const { return total_ == 0; }
  std::int64_t min() const;
  std::int64_t max() const;
  /// Sum of all elements counted with multiplicity.
  std::int64_t sum() const;

  const Entries& entries() const { return entries_; }

  friend bool operator==(const Multiset&, const Multiset&) = default;

private:
  Entries entries_;
  std::int64_t total_ = 0;
};

/// {k*X mod Y : k = 1..Y}. For coprime X and Y this is {0, 1, ..., Y-1}.
/// Throws std::invalid_argument if gcd(X, Y) != 1.
Multiset residue_orbit(std::int64_t X, std::int64_t Y);

/// Reduction of the progression <+-y, x, X> modulo X*x:
/// <y mod x, x, X> when negate is false, <y compmod x, x, X> when it is true.
ArithmeticProgression ap_reduce_mod(std::int64_t y, std::int64_t x, std::int64_t X, bool negate);

/// Index pairs (i, j), i in 1..X, j in 1..Y, with i = j (mod gcd(X, Y)).
/// These are exactly the element pairings two sequences of periods X and Y
/// produce together over X*Y/gcd(X, Y) consecutive steps.
std::vector<std::pair<std::int64_t, std::int64_t>> pairing_classes(std::int64_t X, std::int64_t Y);

}  // namespace clockaoi
