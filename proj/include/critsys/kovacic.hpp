#pragma once

// Second part of Kovacic's algorithm for chi'' = r(z) chi, with rational
// pole locations only.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critsys/ratfn.hpp"

namespace critsys {

/// A pole of r with its multiplicity in the reduced denominator.
struct PoleInfo {
  Rational location;
  int order = 0;
};

/// Rational poles of r in increasing order. Throws UnsupportedInstance if the
/// denominator has irreducible factors of degree > 1 over Q.
std::vector<PoleInfo> poles(const RatFn& r);

/// Step-1 set attached to one finite pole, or to infinity when `at_infinity`.
struct ESet {
  bool at_infinity = false;
  Rational location;  // unused at infinity
  int order = 0;      // pole order, or order of r at infinity
  std::vector<BigInt> values;
  std::string rule;   // which Step-1 case produced the set
};

/// Finite poles first (increasing), infinity last. Throws ContractViolation for r = 0.
std::vector<ESet> e_sets(const RatFn& r);

struct DCandidate {
  std::vector<BigInt> family;  // one entry per ESet, same order
  Rational d;
  bool retained = false;  // d is a non-negative integer
};

std::vector<DCandidate> d_candidates(const std::vector<ESet>& sets);

enum class KovacicType { I, II, III };
std::string to_string(KovacicType t);

/// The types among (i), (ii), (iii) whose necessary conditions hold for r.
std::vector<KovacicType> necessary_conditions(const RatFn& r);

/// Laurent coefficients of r at a finite pole c: entry j is the coefficient
/// of (z - c)^(j - order), for j = 0 .. order - 1.
std::vector<Rational> principal_part(const RatFn& r, const PoleInfo& pole);

struct Step3Attempt {
  std::size_t candidate = 0;  // index into d_candidates
  RatFn theta;
  bool solved = false;
  std::optional<RatPoly> p;   // monic, degree d
};

struct KovacicCertificate {
  enum class Outcome { Case2Possible, Case2Impossible };

  RatFn r;
  std::vector<KovacicType> feasible_types;
  std::vector<ESet> e_sets;
  std::vector<DCandidate> d_candidates;
  std::vector<Step3Attempt> attempts;
  Outcome outcome = Outcome::Case2Impossible;
  std::vector<std::string> notes;

  /// First successful Step-3 attempt, when the outcome is Case2Possible.
  const Step3Attempt* witness() const;

  /// Key-value text with one nested block per set, candidate and attempt.
  std::string to_text() const;
};

std::string to_string(KovacicCertificate::Outcome o);

/// Steps 1 to 3, screened by the necessary conditions for type (ii).
KovacicCertificate certify_case2(const RatFn& r);

/// The Step-3 operator applied to P.
RatFn step3_operator(const RatFn& r, const RatFn& theta, const RatFn& p);

/// With phi = theta + P'/P, true iff omega = (phi + sqrt(D))/2 with
/// D = 4r - phi^2 - 2 phi' satisfies omega' + omega^2 = r identically,
/// i.e. D' + 2 phi D == 0.
bool riccati_identity_holds(const RatFn& r, const RatFn& theta, const RatPoly& p);

/// r = a1^2/4 - a1'/2 + a2 for y'' = a1 y' + a2 y.
RatFn normal_form(const RatFn& a1, const RatFn& a2);

/// Coefficients (a1, a2) of the reduced second variational equation in
/// hypergeometric variable z, for exponent k >= 3.
std::pair<RatFn, RatFn> anve_hat_coefficients(int k);

/// Closed form of the normal-form coefficient for exponent k >= 3.
RatFn anve_r(int k);

}  // namespace critsys
