#include "critsys/rational.hpp"

#include <cctype>
#include <cmath>

#include "critsys/errors.hpp"

namespace critsys {

bool is_integer(const Rational& q) { return denominator_of(q) == 1; }

std::optional<BigInt> exact_isqrt(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt root = boost::multiprecision::sqrt(n);
  if (root * root != n) return std::nullopt;
  return root;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  auto num = exact_isqrt(numerator_of(q));
  if (!num) return std::nullopt;
  auto den = exact_isqrt(denominator_of(q));
  if (!den) return std::nullopt;
  return Rational(*num, *den);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot convert non-finite value to a rational");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // 53 bits of mantissa become an exact integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational out{BigInt(scaled)};
  if (exponent > 0) {
    out *= Rational(BigInt(1) << exponent);
  } else if (exponent < 0) {
    out /= Rational(BigInt(1) << (-exponent));
  }
  return out;
}

namespace {

BigInt pow10(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const char* msg) -> Rational { throw ParseError(std::string(msg) + " in '" + std::string(text) + "'", pos); };
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) negative = text[pos++] == '-';

  BigInt digits = 0;
  unsigned frac_digits = 0;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits = digits * 10 + (text[pos++] - '0');
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits = digits * 10 + (text[pos++] - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) return fail("expected a number");
  Rational value(digits, pow10(frac_digits));

  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool neg_exp = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) neg_exp = text[pos++] == '-';
    unsigned e = 0;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      e = e * 10 + static_cast<unsigned>(text[pos++] - '0');
      any = true;
      if (e > 4000) return fail("exponent too large");
    }
    if (!any) return fail("expected exponent digits");
    value = neg_exp ? value / Rational(pow10(e)) : value * Rational(pow10(e));
  } else if (pos < text.size() && text[pos] == '/' && frac_digits == 0) {
    ++pos;
    BigInt den = 0;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      den = den * 10 + (text[pos++] - '0');
      any = true;
    }
    if (!any) return fail("expected denominator digits");
    if (den == 0) return fail("zero denominator");
    value /= Rational(den);
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) return fail("unexpected trailing characters");
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
  if (is_integer(q)) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace critsys
