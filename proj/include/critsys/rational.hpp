#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace critsys {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational with arbitrary-precision numerator and denominator.
/// Always kept reduced with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

bool is_integer(const Rational& q);

/// Nonnegative integer square root if n is a perfect square.
std::optional<BigInt> exact_isqrt(const BigInt& n);

/// sqrt(q) when q is the square of a rational; nullopt otherwise (including q < 0).
std::optional<Rational> exact_sqrt(const Rational& q);

/// Exact value of a binary double (every finite double is a dyadic rational).
Rational rational_from_double(double x);

/// Parses "7", "-3/4", "0.85", "1e-3", "2.5e2". Decimal text is read exactly,
/// so "0.1" is 1/10, not the nearest double.
Rational parse_rational(std::string_view text);

/// "a" for integers, "a/b" otherwise.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

}  // namespace critsys
