#include "critsys/kovacic.hpp"

#include <algorithm>
#include <sstream>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

// Divisor search is by trial division; beyond this the instance is rejected.
const BigInt kMaxRootSearch = BigInt(1000000000000LL);

Rational evaluate(const RatFn& f, const Rational& z) {
  const Rational d = f.den()(z);
  if (d == 0) throw PoleError("evaluation at a pole");
  return f.num()(z) / d;
}

std::vector<BigInt> positive_divisors(BigInt n) {
  if (n < 0) n = -n;
  if (n > kMaxRootSearch) throw UnsupportedInstance("denominator coefficients too large for rational root search");
  std::vector<BigInt> small, large;
  for (BigInt d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Integer polynomial with the same roots as p.
std::vector<BigInt> integer_coefficients(const RatPoly& p) {
  BigInt l = 1;
  for (const auto& c : p.coefficients()) {
    const BigInt den = denominator_of(c);
    l = l / boost::multiprecision::gcd(l, den) * den;
  }
  std::vector<BigInt> out;
  for (const auto& c : p.coefficients()) out.push_back(numerator_of(c * l));
  return out;
}

int strip_root(RatPoly& p, const Rational& c) {
  int mult = 0;
  const RatPoly factor = RatPoly::linear_root(c);
  for (;;) {
    auto [q, rem] = RatPoly::divmod(p, factor);
    if (!rem.is_zero()) return mult;
    p = q;
    ++mult;
  }
}

std::string join(const std::vector<BigInt>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i].str();
  }
  return out + "]";
}

// Solves A x = b exactly; nullopt when inconsistent. Free unknowns are set to 0.
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                                                  std::size_t unknowns) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < unknowns && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[row]);
    std::swap(b[piv], b[row]);
    const Rational inv = Rational(1) / a[row][col];
    for (std::size_t j = col; j < unknowns; ++j) a[row][j] *= inv;
    b[row] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j < unknowns; ++j) a[i][j] -= f * a[row][j];
      b[i] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < rows; ++i) {
    if (b[i] != 0) return std::nullopt;
  }
  std::vector<Rational> x(unknowns, Rational(0));
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
  return x;
}

std::optional<RatPoly> solve_monic(const RatFn& r, const RatFn& theta, int d) {
  std::vector<RatFn> images;
  RatPoly lcm = RatPoly::constant(1);
  for (int i = 0; i <= d; ++i) {
    images.push_back(step3_operator(r, theta, RatFn(RatPoly::monomial(1, i))));
    const RatPoly& den = images.back().den();
    lcm = RatPoly::divmod(lcm * den, gcd(lcm, den)).first;
  }
  std::vector<RatPoly> nums;
  int top = -1;
  for (const auto& f : images) {
    nums.push_back(f.num() * RatPoly::divmod(lcm, f.den()).first);
    top = std::max(top, nums.back().degree());
  }
  const auto unknowns = static_cast<std::size_t>(d);
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (int e = 0; e <= top; ++e) {
    std::vector<Rational> eq(unknowns);
    for (std::size_t i = 0; i < unknowns; ++i) eq[i] = nums[i].coeff(e);
    a.push_back(std::move(eq));
    b.push_back(-nums[unknowns].coeff(e));
  }
  auto x = solve_linear(std::move(a), std::move(b), unknowns);
  if (!x) return std::nullopt;
  x->push_back(Rational(1));
  RatPoly p(std::move(*x));
  if (!step3_operator(r, theta, RatFn(p)).is_zero()) return std::nullopt;
  return p;
}

}  // namespace

std::vector<PoleInfo> poles(const RatFn& r) {
  RatPoly rest = r.den();
  std::vector<PoleInfo> out;
  if (int m = strip_root(rest, 0); m > 0) out.push_back({Rational(0), m});
  if (rest.degree() > 0) {
    const auto ints = integer_coefficients(rest);
    for (const auto& q : positive_divisors(ints.back())) {
      for (const auto& p : positive_divisors(ints.front())) {
        for (int sign : {1, -1}) {
          if (rest.degree() == 0) break;
          const Rational c = Rational(BigInt(sign) * p, q);
          if (int m = strip_root(rest, c); m > 0) out.push_back({c, m});
        }
      }
    }
  }
  if (rest.degree() > 0) {
    throw UnsupportedInstance("denominator factor " + rest.to_string() + " has no rational root; only rational poles are supported");
  }
  std::sort(out.begin(), out.end(), [](const PoleInfo& a, const PoleInfo& b) { return a.location < b.location; });
  return out;
}

std::vector<Rational> principal_part(const RatFn& r, const PoleInfo& pole) {
  RatPoly rest = r.den();
  for (int i = 0; i < pole.order; ++i) rest = RatPoly::divmod(rest, RatPoly::linear_root(pole.location)).first;
  RatFn h(r.num(), rest);
  std::vector<Rational> out;
  Rational factorial = 1;
  for (int j = 0; j < pole.order; ++j) {
    if (j > 0) factorial *= j;
    out.push_back(evaluate(h, pole.location) / factorial);
    h = h.derivative();
  }
  return out;
}

namespace {

std::vector<BigInt> order_two_set(const Rational& b) {
  std::vector<BigInt> out{BigInt(2)};
  if (auto s = exact_sqrt(1 + 4 * b)) {
    for (int l : {-2, 2}) {
      const Rational v = 2 + l * *s;
      if (is_integer(v)) out.push_back(numerator_of(v));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<ESet> e_sets(const RatFn& r) {
  if (r.is_zero()) throw ContractViolation("Step-1 sets are undefined for r = 0");
  std::vector<ESet> out;
  for (const auto& pole : poles(r)) {
    ESet e;
    e.location = pole.location;
    e.order = pole.order;
    if (pole.order == 1) {
      e.values = {4};
      e.rule = "pole of order 1";
    } else if (pole.order == 2) {
      e.values = order_two_set(principal_part(r, pole)[0]);
      e.rule = "pole of order 2";
    } else {
      e.values = {pole.order};
      e.rule = "pole of order greater than 2";
    }
    out.push_back(std::move(e));
  }
  ESet inf;
  inf.at_infinity = true;
  inf.order = r.order_at_infinity();
  if (inf.order > 2) {
    inf.values = {0, 2, 4};
    inf.rule = "order at infinity greater than 2";
  } else if (inf.order == 2) {
    inf.values = order_two_set(r.num().leading() / r.den().leading());
    inf.rule = "order at infinity 2";
  } else {
    inf.values = {inf.order};
    inf.rule = "order at infinity less than 2";
  }
  out.push_back(std::move(inf));
  return out;
}

std::vector<DCandidate> d_candidates(const std::vector<ESet>& sets) {
  std::vector<DCandidate> out;
  if (sets.empty()) return out;
  std::vector<std::size_t> idx(sets.size(), 0);
  for (;;) {
    DCandidate c;
    BigInt finite_sum = 0;
    BigInt at_inf = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const BigInt& v = sets[i].values[idx[i]];
      c.family.push_back(v);
      if (sets[i].at_infinity) {
        at_inf = v;
      } else {
        finite_sum += v;
      }
    }
    c.d = Rational(at_inf - finite_sum, 2);
    c.retained = is_integer(c.d) && c.d >= 0;
    out.push_back(std::move(c));
    std::size_t i = sets.size();
    while (i > 0) {
      --i;
      if (++idx[i] < sets[i].values.size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::string to_string(KovacicType t) {
  switch (t) {
    case KovacicType::I: return "i";
    case KovacicType::II: return "ii";
    case KovacicType::III: return "iii";
  }
  return "?";
}

std::vector<KovacicType> necessary_conditions(const RatFn& r) {
  const auto ps = poles(r);
  const int inf = r.order_at_infinity();
  std::vector<KovacicType> out;

  const bool poles_i = std::all_of(ps.begin(), ps.end(), [](const PoleInfo& p) { return p.order == 1 || p.order % 2 == 0; });
  if (poles_i && (inf % 2 == 0 || inf > 2)) out.push_back(KovacicType::I);

  if (std::any_of(ps.begin(), ps.end(), [](const PoleInfo& p) { return p.order == 2 || (p.order > 2 && p.order % 2 == 1); })) {
    out.push_back(KovacicType::II);
  }

  bool iii = inf >= 2 && std::all_of(ps.begin(), ps.end(), [](const PoleInfo& p) { return p.order <= 2; });
  if (iii) {
    Rational alpha_sum = 0, beta_sum = 0;
    for (const auto& p : ps) {
      const auto pp = principal_part(r, p);
      if (p.order == 2) {
        if (!exact_sqrt(1 + 4 * pp[0])) iii = false;
        alpha_sum += pp[0];
        beta_sum += pp[1];
      } else {
        beta_sum += pp[0];
      }
    }
    if (beta_sum != 0 || !exact_sqrt(1 + 4 * (alpha_sum + beta_sum))) iii = false;
  }
  if (iii) out.push_back(KovacicType::III);
  return out;
}

RatFn step3_operator(const RatFn& r, const RatFn& theta, const RatFn& p) {
  const RatFn p1 = p.derivative(), p2 = p1.derivative(), p3 = p2.derivative();
  const RatFn t1 = theta.derivative(), t2 = t1.derivative();
  const RatFn three(Rational(3)), four(Rational(4)), two(Rational(2));
  return p3 + three * theta * p2 + (three * theta * theta + three * t1 - four * r) * p1 +
         (t2 + three * theta * t1 + theta * theta * theta - four * r * theta - two * r.derivative()) * p;
}

bool riccati_identity_holds(const RatFn& r, const RatFn& theta, const RatPoly& p) {
  const RatFn phi = theta + RatFn(p.derivative(), p);
  const RatFn disc = RatFn(Rational(4)) * r - phi * phi - RatFn(Rational(2)) * phi.derivative();
  return (disc.derivative() + RatFn(Rational(2)) * phi * disc).is_zero();
}

std::string to_string(KovacicCertificate::Outcome o) {
  return o == KovacicCertificate::Outcome::Case2Possible ? "Case2Possible" : "Case2Impossible";
}

const Step3Attempt* KovacicCertificate::witness() const {
  for (const auto& a : attempts) {
    if (a.solved) return &a;
  }
  return nullptr;
}

KovacicCertificate certify_case2(const RatFn& r) {
  KovacicCertificate cert;
  cert.r = r;
  cert.feasible_types = necessary_conditions(r);
  const bool ii = std::find(cert.feasible_types.begin(), cert.feasible_types.end(), KovacicType::II) !=
                  cert.feasible_types.end();
  if (!ii) {
    cert.notes.push_back("necessary condition for type (ii) fails: no pole of order 2 or of odd order greater than 2");
    cert.outcome = KovacicCertificate::Outcome::Case2Impossible;
    return cert;
  }
  cert.e_sets = e_sets(r);
  cert.d_candidates = d_candidates(cert.e_sets);
  for (std::size_t i = 0; i < cert.d_candidates.size(); ++i) {
    const auto& cand = cert.d_candidates[i];
    if (!cand.retained) continue;
    Step3Attempt attempt;
    attempt.candidate = i;
    for (std::size_t j = 0; j < cert.e_sets.size(); ++j) {
      const auto& set = cert.e_sets[j];
      if (set.at_infinity) continue;
      attempt.theta = attempt.theta + RatFn(RatPoly::constant(Rational(cand.family[j], 2)), RatPoly::linear_root(set.location));
    }
    attempt.p = solve_monic(r, attempt.theta, static_cast<int>(numerator_of(cand.d)));
    attempt.solved = attempt.p.has_value();
    cert.attempts.push_back(std::move(attempt));
  }
  if (cert.attempts.empty()) {
    cert.notes.push_back("no family gives a non-negative integer d; type (ii) is impossible");
  } else if (!cert.witness()) {
    cert.notes.push_back("no monic polynomial solves the Step-3 equation for any retained family; type (ii) is impossible");
  }
  cert.outcome = cert.witness() ? KovacicCertificate::Outcome::Case2Possible : KovacicCertificate::Outcome::Case2Impossible;
  return cert;
}

std::string KovacicCertificate::to_text() const {
  std::ostringstream os;
  os << "r: " << r.to_string() << "\n";
  os << "feasible_types: [";
  for (std::size_t i = 0; i < feasible_types.size(); ++i) os << (i ? ", " : "") << to_string(feasible_types[i]);
  os << "]\n";
  os << "e_sets:\n";
  for (const auto& e : e_sets) {
    os << "  - at: " << (e.at_infinity ? std::string("infinity") : critsys::to_string(e.location)) << "\n";
    os << "    order: " << e.order << "\n";
    os << "    rule: " << e.rule << "\n";
    os << "    values: " << join(e.values) << "\n";
  }
  os << "d_candidates:\n";
  for (const auto& c : d_candidates) {
    os << "  - family: " << join(c.family) << "\n";
    os << "    d: " << critsys::to_string(c.d) << "\n";
    os << "    retained: " << (c.retained ? "true" : "false") << "\n";
  }
  os << (attempts.empty() ? "step3: []\n" : "step3:\n");
  for (const auto& a : attempts) {
    os << "  - candidate: " << a.candidate << "\n";
    os << "    theta: " << a.theta.to_string() << "\n";
    os << "    solved: " << (a.solved ? "true" : "false") << "\n";
    if (a.p) os << "    p: " << a.p->to_string() << "\n";
  }
  os << "outcome: " << to_string(outcome) << "\n";
  os << (notes.empty() ? "notes: []\n" : "notes:\n");
  for (const auto& n : notes) os << "  - " << n << "\n";
  return os.str();
}

RatFn normal_form(const RatFn& a1, const RatFn& a2) {
  return a1 * a1 / RatFn(Rational(4)) - a1.derivative() / RatFn(Rational(2)) + a2;
}

std::pair<RatFn, RatFn> anve_hat_coefficients(int k) {
  if (k < 3) throw ContractViolation("exponent k must be at least 3");
  const RatFn z = RatFn::z();
  const RatFn a1 = RatFn(Rational(-3, 2)) / z;
  const Rational c = Rational(k, 8 * (k - 1) * (k - 1));
  const RatFn a2 = RatFn(c) * (RatFn(Rational(2)) * z - RatFn(Rational(1))) / z.pow(3);
  return {a1, a2};
}

RatFn anve_r(int k) {
  if (k < 3) throw ContractViolation("exponent k must be at least 3");
  const RatFn z = RatFn::z();
  const long km1sq = static_cast<long>(k - 1) * (k - 1);
  const Rational c2((k - 3) * (3 * k - 1), 16 * km1sq);
  const Rational c3(k, 8 * km1sq);
  return -(RatFn(c2) / z.pow(2) + RatFn(c3) / z.pow(3));
}

}  // namespace critsys
