#pragma once

// Integrability decision for the Hamiltonian family: exponent differences of
// the reduced variational equation, Kimura's solvability test for the
// hypergeometric equation, the membership sets it implies, and the final
// classification with an evidence trail.

#include <optional>
#include <string>
#include <vector>

#include "critsys/dynamics.hpp"
#include "critsys/kovacic.hpp"
#include "critsys/rational.hpp"

namespace critsys {

/// Unsigned exponent differences (rho, tau, sigma); rho is kept through its
/// square so irrational and imaginary values stay exact.
struct ExponentTriple {
  Rational rho_sq;
  Rational tau;
  Rational sigma;

  bool rho_is_complex() const { return rho_sq < 0; }
  /// rho when rho_sq is the square of a rational.
  std::optional<Rational> rho() const { return exact_sqrt(rho_sq); }
};

/// rho^2 = (mu2/mu1)/(k-1)^2, tau = (k+1)/(2(k-1)), sigma = 1/2.
/// Throws ContractViolation if mu1 = 0 or k < 3.
ExponentTriple exponent_differences(int k, const Rational& mu1, const Rational& mu2);

struct KimuraCertificate {
  bool solvable = false;
  /// "i" (odd integer sum), "ii" (Schwarz table row) or empty.
  std::string condition;
  /// Signs applied to (rho, tau, sigma), as +1/-1.
  int signs[3] = {1, 1, 1};
  /// Schwarz table row 1..15 for condition (ii); 0 otherwise.
  int row = 0;
  /// slot_of[i] is the table column (0..2) holding the i-th exponent.
  int slot_of[3] = {0, 1, 2};
  std::string detail;
};

/// Condition (i) alone: some +-rho +-tau +-sigma is an odd integer.
bool kimura_condition_i(const ExponentTriple& t, KimuraCertificate* cert = nullptr);

/// Condition (i) or membership in one of the fifteen Schwarz families.
KimuraCertificate kimura_solvable(const ExponentTriple& t);

/// ratio in {((k-1)l +- 1)^2 : l in N} or {(k-1)^2 (2l+1)^2 / 4 : l in Z}.
bool membership_condition(int k, const Rational& ratio);

/// SystemParams with exact frequencies.
struct ExactSystem {
  int k = 2;
  int epsilon = 1;
  std::vector<Rational> mu;
  int m() const { return static_cast<int>(mu.size()); }
};

struct TrailEntry {
  std::string check;
  bool holds = false;
  std::string detail;
};

struct Verdict {
  enum class Status { Integrable, NonIntegrable };

  Status status = Status::NonIntegrable;
  /// "quadratic-coupling", "equal-frequencies", "exponent-membership",
  /// "kovacic-case-ii".
  std::string rule;
  /// Integrable: names of the first integrals.
  std::vector<std::string> integrals;
  /// NonIntegrable: the violated condition, in words.
  std::string violated;
  /// NonIntegrable: 1-based indices of the witness pair (1, j0).
  int witness_i = 0;
  int witness_j = 0;
  std::vector<TrailEntry> trail;
  std::optional<KovacicCertificate> kovacic;

  /// Key-value text; the Kovacic certificate, when present, is nested.
  std::string to_text() const;
};

std::string to_string(Verdict::Status s);

Verdict classify(const ExactSystem& sys);
/// Converts each double exactly (binary value) and classifies.
Verdict classify(const SystemParams& params);

/// The two-frequency system of degree 2n in the coupling term, mapped by
/// (u1, u2, v1, v2) -> (-u1, -i u2, -v1, i v2) onto the family with
/// k = 2n, epsilon = -1.
Verdict classify_gap_system(int n, const Rational& mu1, const Rational& mu2);

/// Image parameters of the gap system under the canonical transformation.
ExactSystem gap_system_image(int n, const Rational& mu1, const Rational& mu2);

/// Gap Hamiltonian 1/2(v1^2 - v2^2 + mu1 u1^2 - mu2 u2^2) + (u1^2 - u2^2)^(2n) / (4n)
/// evaluated on a complex state.
std::complex<double> gap_hamiltonian(int n, double mu1, double mu2, const ComplexPhaseState& state);

/// The canonical transformation taking gap-system states to family states.
ComplexPhaseState gap_to_family(const ComplexPhaseState& state);

}  // namespace critsys
