#include "critsys/ratfn.hpp"

#include <cctype>

#include "critsys/errors.hpp"

namespace critsys {

RatPoly::RatPoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

void RatPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

RatPoly RatPoly::constant(const Rational& c) { return RatPoly({c}); }

RatPoly RatPoly::monomial(const Rational& c, int degree) {
  std::vector<Rational> cs(static_cast<std::size_t>(degree) + 1, Rational(0));
  cs.back() = c;
  return RatPoly(std::move(cs));
}

RatPoly RatPoly::linear_root(const Rational& c) { return RatPoly({-c, Rational(1)}); }

Rational RatPoly::coeff(int i) const {
  if (i < 0 || i > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(i)];
}

Rational RatPoly::leading() const { return is_zero() ? Rational(0) : coeffs_.back(); }

Rational RatPoly::operator()(const Rational& z) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

RatPoly RatPoly::derivative() const {
  if (degree() < 1) return {};
  std::vector<Rational> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<long>(i));
  return RatPoly(std::move(out));
}

RatPoly RatPoly::monic() const {
  if (is_zero()) return {};
  return (Rational(1) / leading()) * *this;
}

RatPoly RatPoly::operator-() const { return Rational(-1) * *this; }

RatPoly operator+(const RatPoly& a, const RatPoly& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
  return RatPoly(std::move(out));
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) { return a + (-b); }

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return RatPoly(std::move(out));
}

RatPoly operator*(const Rational& c, const RatPoly& a) {
  if (c == 0) return {};
  std::vector<Rational> out = a.coeffs_;
  for (auto& x : out) x *= c;
  return RatPoly(std::move(out));
}

std::pair<RatPoly, RatPoly> RatPoly::divmod(const RatPoly& a, const RatPoly& b) {
  if (b.is_zero()) throw ValidationError("polynomial division by zero");
  if (a.degree() < b.degree()) return {RatPoly{}, a};
  std::vector<Rational> rem = a.coeffs_;
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - b.degree()) + 1, Rational(0));
  const Rational lead_inv = Rational(1) / b.leading();
  const auto bd = static_cast<std::size_t>(b.degree());
  for (std::size_t shift = quot.size(); shift-- > 0;) {
    const Rational factor = rem[shift + bd] * lead_inv;
    quot[shift] = factor;
    if (factor == 0) continue;
    for (std::size_t j = 0; j <= bd; ++j) rem[shift + j] -= factor * b.coeffs_[j];
  }
  return {RatPoly(std::move(quot)), RatPoly(std::move(rem))};
}

std::string RatPoly::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (int d = degree(); d >= 0; --d) {
    const Rational& c = coeffs_[static_cast<std::size_t>(d)];
    if (c == 0) continue;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    std::string term;
    if (d == 0) {
      term = critsys::to_string(mag);
    } else {
      const std::string power = d == 1 ? "z" : "z^" + std::to_string(d);
      term = mag == 1 ? power : critsys::to_string(mag) + "*" + power;
    }
    if (out.empty()) {
      out = negative ? "-" + term : term;
    } else {
      out += (negative ? "-" : "+") + term;
    }
  }
  return out;
}

RatPoly gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    auto r = RatPoly::divmod(a, b).second;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

RatFn::RatFn(RatPoly num, RatPoly den) {
  if (den.is_zero()) throw ValidationError("rational function with zero denominator");
  if (num.is_zero()) {
    den_ = RatPoly::constant(1);
    return;
  }
  const RatPoly g = gcd(num, den);
  if (g.degree() > 0) {
    num = RatPoly::divmod(num, g).first;
    den = RatPoly::divmod(den, g).first;
  }
  const Rational scale = Rational(1) / den.leading();
  num_ = scale * num;
  den_ = scale * den;
}

RatFn RatFn::z() { return RatFn(RatPoly({Rational(0), Rational(1)})); }

int RatFn::order_at_infinity() const {
  if (is_zero()) return kZeroOrderAtInfinity;
  return den_.degree() - num_.degree();
}

RatFn RatFn::derivative() const {
  return RatFn(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

RatFn RatFn::pow(int exponent) const {
  if (exponent < 0) {
    if (is_zero()) throw ValidationError("zero raised to a negative power");
    return RatFn(den_, num_).pow(-exponent);
  }
  RatFn out(Rational(1));
  RatFn base = *this;
  while (exponent > 0) {
    if (exponent & 1) out = out * base;
    base = base * base;
    exponent >>= 1;
  }
  return out;
}

RatFn RatFn::operator-() const { return RatFn(-num_, den_); }

RatFn operator+(const RatFn& a, const RatFn& b) {
  if (a.den_ == b.den_) return RatFn(a.num_ + b.num_, a.den_);
  return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }

RatFn operator*(const RatFn& a, const RatFn& b) { return RatFn(a.num_ * b.num_, a.den_ * b.den_); }

RatFn operator/(const RatFn& a, const RatFn& b) {
  if (b.is_zero()) throw ValidationError("rational function division by zero");
  return RatFn(a.num_ * b.den_, a.den_ * b.num_);
}

std::string RatFn::to_string() const {
  if (den_.degree() == 0) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  RatFn parse() {
    RatFn out = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatFn expression() {
    RatFn acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  RatFn term() {
    RatFn acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        RatFn divisor = unary();
        if (divisor.is_zero()) throw ParseError("division by the zero polynomial", at);
        acc = acc / divisor;
      } else {
        return acc;
      }
    }
  }

  RatFn unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  RatFn power() {
    RatFn base = primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    const bool parens = accept('(');
    const long e = integer_exponent();
    if (parens && !accept(')')) fail("expected ')' after exponent");
    if (base.is_zero() && e < 0) throw ParseError("zero raised to a negative power", at);
    return base.pow(static_cast<int>(e));
  }

  long integer_exponent() {
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) negative = text_[pos_++] == '-';
    skip_space();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_++] - '0');
      if (value > 10000) fail("exponent too large");
    }
    if (pos_ == start) fail("expected an integer exponent");
    return negative ? -value : value;
  }

  RatFn primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RatFn inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == 'z') {
      ++pos_;
      return RatFn::z();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  RatFn number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    try {
      return RatFn(parse_rational(text_.substr(start, pos_ - start)));
    } catch (const ParseError&) {
      throw ParseError("malformed number", start);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RatFn parse_ratfn(std::string_view text) { return ExpressionParser(text).parse(); }

}  // namespace critsys
