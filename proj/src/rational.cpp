#include "clockaoi/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace clockaoi {

namespace {

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("rational: integer part exceeds 64 bits");
  return z.get_si();
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("not an integer");
  mpz_class z(std::string(s), 10);
  return negative ? mpz_class(-z) : z;
}

mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational: zero denominator");
  Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

std::int64_t floor_of(const Rational& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return to_int64(r);
}

std::int64_t ceil_of(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return to_int64(r);
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

Rational parse_rational(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> Rational { throw std::invalid_argument("cannot parse rational '" + original + "'"); };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return fail();

  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      mpz_class num = parse_integer(text.substr(0, slash));
      mpz_class den = parse_integer(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("rational: zero denominator in '" + original + "'");
      Rational q(num, den);
      q.canonicalize();
      return q;
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mpz_class ez = parse_integer(text.substr(e + 1));
      if (!ez.fits_slong_p() || ez > 4096 || ez < -4096) return fail();
      exponent = ez.get_si();
      text = text.substr(0, e);
    }
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    std::string digits;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      auto int_part = text.substr(0, dot);
      auto frac_part = text.substr(dot + 1);
      if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
          (!frac_part.empty() && !all_digits(frac_part)))
        return fail();
      digits = std::string(int_part) + std::string(frac_part);
      exponent -= static_cast<long>(frac_part.size());
    } else {
      if (!all_digits(text)) return fail();
      digits = std::string(text);
    }
    Rational q(mpz_class(digits, 10));
    if (exponent > 0) q *= Rational(pow10(exponent));
    if (exponent < 0) q /= Rational(pow10(-exponent));
    q.canonicalize();
    return negative ? Rational(-q) : q;
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception&) {
    return fail();
  }
}

}  // namespace clockaoi
