#include <doctest.h>

#include <random>

#include "critsys/errors.hpp"
#include "critsys/ratfn.hpp"

using namespace critsys;

namespace {

RatFn random_ratfn(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> deg(0, 3);
  auto poly = [&](bool nonzero) {
    for (;;) {
      std::vector<Rational> cs;
      const int d = deg(rng);
      for (int i = 0; i <= d; ++i) cs.push_back(Rational(coef(rng), 1 + (rng() % 3)));
      RatPoly p(cs);
      if (!nonzero || !p.is_zero()) return p;
    }
  };
  return RatFn(poly(false), poly(true));
}

}  // namespace

TEST_CASE("polynomial division reproduces the dividend") {
  const RatPoly a({Rational(1), Rational(-2), Rational(0), Rational(3)});
  const RatPoly b({Rational(1, 2), Rational(1)});
  auto [q, r] = RatPoly::divmod(a, b);
  CHECK(q * b + r == a);
  CHECK(r.degree() < b.degree());
}

TEST_CASE("gcd is monic and divides both inputs") {
  const RatPoly f = RatPoly::linear_root(2) * RatPoly::linear_root(Rational(-1, 3));
  const RatPoly g = Rational(5) * RatPoly::linear_root(2) * RatPoly::linear_root(7);
  const RatPoly h = gcd(f, g);
  CHECK(h == RatPoly::linear_root(2));
  CHECK(gcd(RatPoly{}, RatPoly{}).is_zero());
}

TEST_CASE("parser normalizes to coprime numerator and monic denominator") {
  const RatFn r = parse_ratfn("-3/(32*z^3)");
  CHECK(r.num() == RatPoly::constant(Rational(-3, 32)));
  CHECK(r.den() == RatPoly::monomial(1, 3));
  CHECK(parse_ratfn("0").is_zero());
  CHECK(parse_ratfn("(z^2-1)/(z-1)") == parse_ratfn("z+1"));
  CHECK(parse_ratfn("z^-2") == RatFn(Rational(1)) / RatFn::z().pow(2));
  CHECK(parse_ratfn("-z^2") == -(RatFn::z() * RatFn::z()));
  CHECK(parse_ratfn("0.25*z") == RatFn(Rational(1, 4)) * RatFn::z());
  CHECK(parse_ratfn(" 2 * ( z + 1 ) ") == parse_ratfn("2*z+2"));
}

TEST_CASE("parser reports the offending position") {
  try {
    parse_ratfn("z + * 2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(parse_ratfn("1/(z-z)"), ParseError);
  CHECK_THROWS_AS(parse_ratfn("(z+1"), ParseError);
  CHECK_THROWS_AS(parse_ratfn("x"), ParseError);
  CHECK_THROWS_AS(parse_ratfn(""), ParseError);
}

TEST_CASE("printer output parses back to the same function") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const RatFn f = random_ratfn(rng);
    CHECK(parse_ratfn(f.to_string()) == f);
  }
}

TEST_CASE("arithmetic round trips on random instances") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const RatFn a = random_ratfn(rng);
    const RatFn b = random_ratfn(rng);
    CHECK((a + b) - b == a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
  }
}

TEST_CASE("derivative obeys the quotient rule on a known case") {
  // d/dz 1/z^3 = -3/z^4
  CHECK(parse_ratfn("1/z^3").derivative() == parse_ratfn("-3/z^4"));
  CHECK(parse_ratfn("z^2/(z+1)").order_at_infinity() == -1);
  CHECK(RatFn().order_at_infinity() == kZeroOrderAtInfinity);
}
