#include "clockaoi/modmath.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace clockaoi {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_sub_overflow(x, y, &r)) throw std::overflow_error("integer overflow in subtraction");
  return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("integer overflow in multiplication");
  return r;
}

std::int64_t floor_mod(std::int64_t x, std::int64_t y) {
  if (y <= 0) throw std::domain_error("floor_mod: modulus must be positive, got " + std::to_string(y));
  std::int64_t r = x % y;
  return r < 0 ? r + y : r;
}

std::int64_t comp_mod(std::int64_t x, std::int64_t y) {
  if (y <= 0) throw std::domain_error("comp_mod: modulus must be positive, got " + std::to_string(y));
  std::int64_t r = x % y;
  // ceil(x/y)*y - x
  return r > 0 ? y - r : -r;
}

std::int64_t floor_div(std::int64_t x, std::int64_t y) {
  if (y <= 0) throw std::domain_error("floor_div: divisor must be positive");
  std::int64_t q = x / y;
  return (x % y < 0) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t x, std::int64_t y) {
  if (y <= 0) throw std::domain_error("ceil_div: divisor must be positive");
  std::int64_t q = x / y;
  return (x % y > 0) ? q + 1 : q;
}

ArithmeticProgression::ArithmeticProgression(std::int64_t start, std::int64_t step, std::int64_t count)
    : start(start), step(step), count(count) {
  if (start < 0) throw std::invalid_argument("progression start must be nonnegative");
  if (step < 1) throw std::invalid_argument("progression step must be positive");
  if (count < 1) throw std::invalid_argument("progression count must be positive");
  checked_add(start, checked_mul(count - 1, step));
}

std::vector<std::int64_t> ArithmeticProgression::elements() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t m = 0; m < count; ++m) out.push_back(start + m * step);
  return out;
}

void Multiset::add(std::int64_t value, std::int64_t multiplicity) {
  if (multiplicity < 0) throw std::invalid_argument("multiset: negative multiplicity");
  if (multiplicity == 0) return;
  auto& slot = entries_[value];
  slot = checked_add(slot, multiplicity);
  total_ = checked_add(total_, multiplicity);
}

void Multiset::add(const ArithmeticProgression& progression) {
  for (std::int64_t m = 0; m < progression.count; ++m) add(progression.start + m * progression.step);
}

Multiset& Multiset::operator+=(const Multiset& other) {
  for (const auto& [value, mult] : other.entries_) add(value, mult);
  return *this;
}

std::int64_t Multiset::count(std::int64_t value) const {
  auto it = entries_.find(value);
  return it == entries_.end() ? 0 : it->second;
}

std::int64_t Multiset::min() const {
  if (entries_.empty()) throw std::domain_error("multiset: min of empty set");
  return entries_.begin()->first;
}

std::int64_t Multiset::max() const {
  if (entries_.empty()) throw std::domain_error("multiset: max of empty set");
  return entries_.rbegin()->first;
}

std::int64_t Multiset::sum() const {
  std::int64_t s = 0;
  for (const auto& [value, mult] : entries_) s = checked_add(s, checked_mul(value, mult));
  return s;
}

Multiset residue_orbit(std::int64_t X, std::int64_t Y) {
  if (X < 1 || Y < 1) throw std::invalid_argument("residue_orbit: arguments must be positive");
  if (std::gcd(X, Y) != 1)
    throw std::invalid_argument("residue_orbit: requires coprime arguments, gcd(" + std::to_string(X) + ", " +
                                std::to_string(Y) + ") = " + std::to_string(std::gcd(X, Y)));
  Multiset out;
  const std::int64_t step = X % Y;
  std::int64_t r = 0;
  for (std::int64_t k = 1; k <= Y; ++k) {
    r += step;
    if (r >= Y) r -= Y;
    out.add(r);
  }
  return out;
}

ArithmeticProgression ap_reduce_mod(std::int64_t y, std::int64_t x, std::int64_t X, bool negate) {
  if (x < 1 || X < 1) throw std::invalid_argument("ap_reduce_mod: x and X must be positive");
  return {negate ? comp_mod(y, x) : floor_mod(y, x), x, X};
}

std::vector<std::pair<std::int64_t, std::int64_t>> pairing_classes(std::int64_t X, std::int64_t Y) {
  if (X < 1 || Y < 1) throw std::invalid_argument("pairing_classes: arguments must be positive");
  const std::int64_t z = std::gcd(X, Y);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(static_cast<std::size_t>(X / z * Y));
  for (std::int64_t i = 1; i <= X; ++i)
    for (std::int64_t j = 1 + floor_mod(i - 1, z); j <= Y; j += z) out.emplace_back(i, j);
  return out;
}

}  // namespace clockaoi
