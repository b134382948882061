#include "critsys/galois.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

struct SchwarzRow {
  Rational frac[3];
  bool third_arbitrary;
  bool even_sum;
};

// Fractional parts of the fifteen Schwarz families; integers l, s, v are added
// slot by slot.
const std::array<SchwarzRow, 15>& schwarz_table() {
  static const std::array<SchwarzRow, 15> rows = {{
      {{Rational(1, 2), Rational(1, 2), Rational(0)}, true, false},
      {{Rational(1, 2), Rational(1, 3), Rational(1, 3)}, false, false},
      {{Rational(2, 3), Rational(1, 3), Rational(1, 3)}, false, true},
      {{Rational(1, 2), Rational(1, 3), Rational(1, 4)}, false, false},
      {{Rational(2, 3), Rational(1, 4), Rational(1, 4)}, false, true},
      {{Rational(1, 2), Rational(1, 3), Rational(1, 5)}, false, false},
      {{Rational(2, 5), Rational(1, 3), Rational(1, 3)}, false, true},
      {{Rational(2, 3), Rational(1, 5), Rational(1, 5)}, false, true},
      {{Rational(1, 2), Rational(2, 5), Rational(1, 5)}, false, true},
      {{Rational(3, 5), Rational(1, 3), Rational(1, 5)}, false, true},
      {{Rational(2, 5), Rational(2, 5), Rational(2, 5)}, false, true},
      {{Rational(2, 3), Rational(1, 3), Rational(1, 5)}, false, true},
      {{Rational(4, 5), Rational(1, 5), Rational(1, 5)}, false, true},
      {{Rational(1, 2), Rational(2, 5), Rational(1, 3)}, false, true},
      {{Rational(3, 5), Rational(2, 5), Rational(1, 3)}, false, true},
  }};
  return rows;
}

const char* kNames[3] = {"rho", "tau", "sigma"};

std::string signed_name(int sign, int i) { return std::string(sign > 0 ? "+" : "-") + kNames[i]; }

bool is_odd_integer(const Rational& q) {
  if (!is_integer(q)) return false;
  return numerator_of(q) % 2 != 0;
}

std::string rho_text(const ExponentTriple& t) {
  if (auto r = t.rho()) return to_string(*r);
  if (t.rho_is_complex()) return "i*sqrt(" + to_string(-t.rho_sq) + ")";
  return "sqrt(" + to_string(t.rho_sq) + ")";
}

std::string triple_text(const ExponentTriple& t) {
  return "rho=" + rho_text(t) + " (rho^2=" + to_string(t.rho_sq) + "), tau=" + to_string(t.tau) +
         ", sigma=" + to_string(t.sigma);
}

}  // namespace

ExponentTriple exponent_differences(int k, const Rational& mu1, const Rational& mu2) {
  if (k < 3) throw ContractViolation("exponent differences need k >= 3");
  if (mu1 == 0) throw ContractViolation("mu1 = 0: the hypergeometric reduction is undefined; use the Kovacic branch");
  const Rational km1(k - 1);
  return {(mu2 / mu1) / (km1 * km1), Rational(k + 1, 2 * (k - 1)), Rational(1, 2)};
}

bool kimura_condition_i(const ExponentTriple& t, KimuraCertificate* cert) {
  const auto rho = t.rho();
  if (!rho) return false;  // irrational or imaginary rho makes every sum non-integer
  const Rational x[3] = {*rho, t.tau, t.sigma};
  for (int s0 : {1, -1}) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        const Rational sum = s0 * x[0] + s1 * x[1] + s2 * x[2];
        if (!is_odd_integer(sum)) continue;
        if (cert) {
          cert->solvable = true;
          cert->condition = "i";
          cert->signs[0] = s0;
          cert->signs[1] = s1;
          cert->signs[2] = s2;
          cert->detail = signed_name(s0, 0) + signed_name(s1, 1) + signed_name(s2, 2) + " = " + to_string(sum) +
                         " is an odd integer";
        }
        return true;
      }
    }
  }
  return false;
}

KimuraCertificate kimura_solvable(const ExponentTriple& t) {
  KimuraCertificate cert;
  if (kimura_condition_i(t, &cert)) return cert;

  const std::optional<Rational> x[3] = {t.rho(), t.tau, t.sigma};
  const auto& table = schwarz_table();
  std::array<int, 3> perm{0, 1, 2};
  for (std::size_t row = 0; row < table.size(); ++row) {
    const auto& r = table[row];
    std::sort(perm.begin(), perm.end());
    do {
      for (int mask = 0; mask < 8; ++mask) {
        const int sg[3] = {(mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
        bool ok = true;
        BigInt parity = 0;
        std::string shifts;
        for (int i = 0; i < 3 && ok; ++i) {
          const int slot = perm[static_cast<std::size_t>(i)];
          if (slot == 2 && r.third_arbitrary) continue;
          if (!x[i]) {
            ok = false;
            break;
          }
          const Rational shift = sg[i] * *x[i] - r.frac[slot];
          if (!is_integer(shift)) {
            ok = false;
            break;
          }
          parity += numerator_of(shift);
        }
        if (!ok) continue;
        if (r.even_sum && parity % 2 != 0) continue;
        cert.solvable = true;
        cert.condition = "ii";
        cert.row = static_cast<int>(row) + 1;
        for (int i = 0; i < 3; ++i) {
          cert.signs[i] = sg[i];
          cert.slot_of[i] = perm[static_cast<std::size_t>(i)];
        }
        std::ostringstream os;
        os << "Schwarz family " << cert.row << ":";
        for (int slot = 0; slot < 3; ++slot) {
          const int i = static_cast<int>(std::find(perm.begin(), perm.end(), slot) - perm.begin());
          os << " " << signed_name(sg[i], i) << " in ";
          if (slot == 2 && r.third_arbitrary) {
            os << "C";
          } else {
            os << to_string(r.frac[slot]) << "+Z";
          }
          if (slot < 2) os << ",";
        }
        if (r.even_sum) os << " (integer shifts sum to " << parity.str() << ", even)";
        cert.detail = os.str();
        return cert;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  cert.detail = t.rho_is_complex() ? "rho is imaginary; no sign pattern gives an odd integer and no Schwarz family matches"
                                   : "no sign pattern gives an odd integer and no Schwarz family matches";
  return cert;
}

bool membership_condition(int k, const Rational& ratio) {
  if (k < 3) throw ContractViolation("membership sets need k >= 3");
  if (ratio < 0) return false;
  const auto s = exact_sqrt(ratio);
  if (!s) return false;
  const BigInt km1 = k - 1;
  if (is_integer(*s)) {
    const BigInt n = numerator_of(*s);
    // n = (k-1) l + 1 with l >= 0, or n = (k-1) l - 1 with l >= 0 (n >= 0)
    if (n >= 1 && (n - 1) % km1 == 0) return true;
    if ((n + 1) % km1 == 0) return true;
  }
  // 2 s / (k-1) odd integer
  return is_odd_integer(2 * *s / Rational(km1));
}

std::string to_string(Verdict::Status s) {
  return s == Verdict::Status::Integrable ? "Integrable" : "NonIntegrable";
}

namespace {

void add(Verdict& v, std::string check, bool holds, std::string detail) {
  v.trail.push_back({std::move(check), holds, std::move(detail)});
}

std::string mu_list(const std::vector<Rational>& mu) {
  std::string out = "(";
  for (std::size_t i = 0; i < mu.size(); ++i) out += (i ? ", " : "") + to_string(mu[i]);
  return out + ")";
}

void nonzero_pair(Verdict& v, int k, const Rational& a, const Rational& b) {
  v.rule = "exponent-membership";
  const Rational forward = b / a;
  const Rational backward = a / b;
  if (forward < 0) {
    add(v, "complex-exponents", true,
        "mu_1 and mu_j0 have opposite signs, so rho^2 < 0 for both ratios and the membership sets (all >= 1) cannot "
        "hold");
  }
  bool member[2];
  const Rational ratios[2] = {forward, backward};
  const Rational base[2] = {a, b};
  const Rational other[2] = {b, a};
  const char* label[2] = {"mu_j0/mu_1", "mu_1/mu_j0"};
  for (int dir = 0; dir < 2; ++dir) {
    const auto triple = exponent_differences(k, base[dir], other[dir]);
    add(v, std::string("exponent-differences ") + label[dir], true,
        "ratio " + to_string(ratios[dir]) + ": " + triple_text(triple));
    const auto kc = kimura_solvable(triple);
    add(v, std::string("kimura ") + label[dir], kc.solvable, kc.detail);
    member[dir] = membership_condition(k, ratios[dir]);
    add(v, std::string("membership ") + label[dir], member[dir],
        "ratio " + to_string(ratios[dir]) + (member[dir] ? " is" : " is not") +
            " of the form ((k-1)l+-1)^2 or (k-1)^2(2l+1)^2/4");
    if (kc.solvable != member[dir]) {
      add(v, std::string("kimura-vs-membership ") + label[dir], false,
          "Kimura's test and the two-family membership sets disagree for this ratio; the verdict follows the "
          "classification theorem");
    }
  }
  add(v, "simultaneous-membership", member[0] && member[1],
      "both sets contain only values >= 1, so membership in both directions forces mu_1 = mu_j0");
  if (!member[0] && !member[1]) {
    v.violated = "neither " + to_string(forward) + " nor " + to_string(backward) + " lies in the membership set";
  } else if (!member[0]) {
    v.violated = "ratio mu_j0/mu_1 = " + to_string(forward) + " is not in the membership set";
  } else {
    v.violated = "ratio mu_1/mu_j0 = " + to_string(backward) + " is not in the membership set";
  }
}

}  // namespace

Verdict classify(const ExactSystem& sys) {
  if (sys.k < 2) throw ContractViolation("k must be at least 2");
  if (sys.epsilon != 1 && sys.epsilon != -1) throw ContractViolation("epsilon must be +1 or -1");
  if (sys.mu.empty()) throw ContractViolation("at least one frequency is required");

  Verdict v;
  const int m = sys.m();
  const bool equal = std::all_of(sys.mu.begin(), sys.mu.end(), [&](const Rational& x) { return x == sys.mu[0]; });
  add(v, "quadratic-coupling", sys.k == 2, "k = " + std::to_string(sys.k));
  add(v, "equal-frequencies", equal, "mu = " + mu_list(sys.mu));

  auto angular = [&] {
    for (int i = 1; i < m; ++i) v.integrals.push_back("I_" + std::to_string(i));
  };
  if (sys.k == 2) {
    v.status = Verdict::Status::Integrable;
    v.rule = "quadratic-coupling";
    v.integrals.push_back("H");
    v.integrals.push_back("F(s) for s off {mu_j}");
    if (equal) angular();
    return v;
  }
  if (equal) {
    v.status = Verdict::Status::Integrable;
    v.rule = "equal-frequencies";
    v.integrals.push_back("H");
    angular();
    return v;
  }

  v.status = Verdict::Status::NonIntegrable;
  int j0 = 1;
  while (sys.mu[static_cast<std::size_t>(j0)] == sys.mu[0]) ++j0;
  v.witness_i = 1;
  v.witness_j = j0 + 1;
  const Rational& a = sys.mu[0];
  const Rational& b = sys.mu[static_cast<std::size_t>(j0)];
  add(v, "witness-pair", true,
      "mu_1 = " + to_string(a) + ", mu_" + std::to_string(j0 + 1) + " = " + to_string(b) + " differ");

  if (a != 0 && b != 0) {
    nonzero_pair(v, sys.k, a, b);
    return v;
  }

  v.rule = "kovacic-case-ii";
  const auto [a1, a2] = anve_hat_coefficients(sys.k);
  const RatFn r = normal_form(a1, a2);
  add(v, "zero-frequency", true,
      std::string(a == 0 ? "mu_1 = 0" : "mu_j0 = 0") + "; reduced equation chi'' = r chi with r = " + r.to_string());
  add(v, "reduced-coefficient", r == anve_r(sys.k), "normal form of the variational equation matches the closed form");
  v.kovacic = certify_case2(r);
  const bool possible = v.kovacic->outcome == KovacicCertificate::Outcome::Case2Possible;
  add(v, "kovacic-case-ii", possible, to_string(v.kovacic->outcome));
  v.violated = possible ? "case (ii) solution found; non-integrability rests on the classification theorem alone"
                        : "the reduced equation has no case-(ii) solution, so its Galois group is SL(2,C)";
  return v;
}

Verdict classify(const SystemParams& params) {
  params.validate();
  ExactSystem sys;
  sys.k = params.k;
  sys.epsilon = params.epsilon;
  for (double x : params.mu) sys.mu.push_back(rational_from_double(x));
  return classify(sys);
}

ExactSystem gap_system_image(int n, const Rational& mu1, const Rational& mu2) {
  if (n < 1) throw ContractViolation("n must be at least 1");
  return {2 * n, -1, {mu1, mu2}};
}

Verdict classify_gap_system(int n, const Rational& mu1, const Rational& mu2) {
  return classify(gap_system_image(n, mu1, mu2));
}

std::complex<double> gap_hamiltonian(int n, double mu1, double mu2, const ComplexPhaseState& s) {
  if (s.dof() != 2 || s.v.size() != 2) throw ContractViolation("gap system has two degrees of freedom");
  const auto& u = s.u;
  const auto& v = s.v;
  const std::complex<double> w = u[0] * u[0] - u[1] * u[1];
  return 0.5 * (v[0] * v[0] - v[1] * v[1] + mu1 * u[0] * u[0] - mu2 * u[1] * u[1]) +
         std::pow(w, 2 * n) / (4.0 * n);
}

ComplexPhaseState gap_to_family(const ComplexPhaseState& s) {
  if (s.dof() != 2 || s.v.size() != 2) throw ContractViolation("gap system has two degrees of freedom");
  const std::complex<double> i(0.0, 1.0);
  return {{-s.u[0], -i * s.u[1]}, {-s.v[0], i * s.v[1]}};
}

std::string Verdict::to_text() const {
  std::ostringstream os;
  os << "status: " << to_string(status) << "\n";
  os << "rule: " << rule << "\n";
  if (status == Status::Integrable) {
    os << "integrals: [";
    for (std::size_t i = 0; i < integrals.size(); ++i) os << (i ? ", " : "") << integrals[i];
    os << "]\n";
  } else {
    os << "witness: [" << witness_i << ", " << witness_j << "]\n";
    os << "violated: " << violated << "\n";
  }
  os << "trail:\n";
  for (const auto& e : trail) {
    os << "  - check: " << e.check << "\n";
    os << "    holds: " << (e.holds ? "true" : "false") << "\n";
    os << "    detail: " << e.detail << "\n";
  }
  if (kovacic) {
    os << "kovacic:\n";
    std::istringstream in(kovacic->to_text());
    for (std::string line; std::getline(in, line);) os << "  " << line << "\n";
  }
  return os.str();
}

}  // namespace critsys
