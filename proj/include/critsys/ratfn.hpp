#pragma once

// Exact univariate polynomials and rational functions in z over Q.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critsys/rational.hpp"

namespace critsys {

/// Dense polynomial, coefficients low-to-high; no trailing zeros.
class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rational> coefficients);

  static RatPoly constant(const Rational& c);
  static RatPoly monomial(const Rational& c, int degree);
  /// The polynomial z - c.
  static RatPoly linear_root(const Rational& c);

  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
  Rational coeff(int i) const;
  Rational leading() const;

  Rational operator()(const Rational& z) const;
  RatPoly derivative() const;
  RatPoly monic() const;

  RatPoly operator-() const;
  friend RatPoly operator+(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator-(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const Rational& c, const RatPoly& a);
  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Quotient and remainder; throws on division by the zero polynomial.
  static std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b);

  /// Parseable text such as "3/4*z^2-z+1".
  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Monic gcd; gcd(0, 0) = 0.
RatPoly gcd(RatPoly a, RatPoly b);

/// Reduced quotient num/den with monic denominator and gcd(num, den) = 1.
class RatFn {
 public:
  RatFn() : den_(RatPoly::constant(1)) {}
  RatFn(RatPoly num, RatPoly den);
  RatFn(const RatPoly& p) : RatFn(p, RatPoly::constant(1)) {}  // NOLINT(google-explicit-constructor)
  RatFn(const Rational& c) : RatFn(RatPoly::constant(c)) {}    // NOLINT(google-explicit-constructor)

  static RatFn z();

  const RatPoly& num() const noexcept { return num_; }
  const RatPoly& den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }

  /// deg(den) - deg(num); a large sentinel for the zero function.
  int order_at_infinity() const;

  RatFn derivative() const;
  RatFn pow(int exponent) const;

  RatFn operator-() const;
  friend RatFn operator+(const RatFn& a, const RatFn& b);
  friend RatFn operator-(const RatFn& a, const RatFn& b);
  friend RatFn operator*(const RatFn& a, const RatFn& b);
  friend RatFn operator/(const RatFn& a, const RatFn& b);
  friend bool operator==(const RatFn& a, const RatFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  /// Text accepted by parse_ratfn, e.g. "(-3/32)/(z^3)".
  std::string to_string() const;

 private:
  RatPoly num_;
  RatPoly den_;
};

inline constexpr int kZeroOrderAtInfinity = 1 << 20;

/// Parses a rational expression in z: integer or decimal literals,
/// + - * / ^ (integer exponents, possibly negative) and parentheses.
/// Throws ParseError carrying the offending position.
RatFn parse_ratfn(std::string_view text);

}  // namespace critsys
