#pragma once

// Extremal sums of the first m Dirichlet eigenvalues over the sphere
// ||q||_p = r, by projected gradient ascent/descent in potential space, and
// reconstruction of the critical system
//
//   -u_i'' + epsilon (sum_j u_j^2)^(p*-1) u_i = mu_i u_i,   p* = p/(p-1)
//
// from an optimizing potential.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critsys/spectral.hpp"

namespace critsys {

enum class Sense { Min, Max };

struct OptimizeProblem {
  int m = 2;
  double p = 2.0;
  double r = 1.0;
  Sense sense = Sense::Min;

  /// Throws ContractViolation unless m >= 2, p > 1 and r > 0 (all finite).
  void validate() const;
  double conjugate_exponent() const { return p / (p - 1.0); }
};

struct OptimizerConfig {
  int n = 2048;  // grid cells
  int restarts = 5;
  std::uint64_t seed = 0;
  int max_iterations = 10000;
  double gradient_tol = 1e-6;  // L2 norm of the sphere-tangential gradient
  double armijo = 1e-4;
  int threads = 1;

  void validate() const;
};

/// One restart's final iterate.
struct Branch {
  int restart = 0;
  PotentialGrid q;
  double value = 0.0;
  int iterations = 0;
  double tangential_gradient = 0.0;
  bool converged = false;
  std::vector<double> trace;  // objective at every accepted iterate
};

struct OptimizeResult {
  PotentialGrid q;  // best branch
  double value = 0.0;
  bool converged = false;
  int best_restart = 0;
  std::vector<Branch> branches;  // in restart order
};

/// Best of cfg.restarts projected-gradient runs. Each step moves the dual
/// variable phi_p(q) along -+ sum E_i^2, maps back with phi_p* and rescales
/// radially onto the sphere; for p = 2 this is the plain gradient step.
/// Non-convergence is reported in the result, never thrown.
OptimizeResult optimize_sum(const OptimizeProblem& prob, const OptimizerConfig& cfg = {});

/// phi_p(t) = |t|^(p-2) t, applied pointwise.
std::vector<double> phi(const std::vector<double>& q, double p);

struct CriticalSolution {
  PotentialGrid q;
  std::vector<double> mu;
  std::vector<std::vector<double>> u;  // u[i] on the grid nodes
  double c = 0.0;
  int epsilon = 0;
  double sum = 0.0;
  double fit_residual = 0.0;  // max |phi_p(q) - c sum E_i^2|
};

/// Fits phi_p(q) = c sum E_i^2 by least squares and rescales u_i = sqrt|c| E_i.
/// value defaults to the eigenvalue sum of q. Throws ExtractionError if |c| < 1e-12.
CriticalSolution extract_critical(const PotentialGrid& q, const OptimizeProblem& prob,
                                  std::optional<double> value = std::nullopt);
CriticalSolution extract_critical(const OptimizeResult& result, const OptimizeProblem& prob);

struct CriticalReport {
  static constexpr double kOdeTol = 1e-3;
  static constexpr double kTol = 1e-4;

  std::vector<double> ode_residual;                  // per component, max-norm
  std::vector<std::array<double, 2>> boundary;       // u_i(0), u_i(1)
  double normalization_residual = 0.0;               // relative, int (sum u^2)^p* vs r^p
  double sum_residual = 0.0;                         // |sum mu_i - value|
  double potential_residual = 0.0;                   // max |q - eps (sum u^2)^(p*-1)|
  double norm_residual = 0.0;                        // relative, ||q||_p vs r
  std::optional<int> k;                              // p* when it is an integer
  std::optional<double> hamiltonian_residual;        // vector-field residual for that k

  bool ode_ok() const;
  bool boundary_ok() const;
  bool normalization_ok() const { return normalization_residual <= kTol; }
  bool sum_ok() const { return sum_residual <= kTol; }
  bool potential_ok() const { return potential_residual <= kTol; }
  bool hamiltonian_ok() const { return !hamiltonian_residual || *hamiltonian_residual <= kOdeTol; }
  bool all_pass() const;

  std::string to_text() const;
};

CriticalReport verify_critical(const CriticalSolution& sol, const OptimizeProblem& prob);

/// CSV with header x,u1,...,um.
void write_critical_csv(const CriticalSolution& sol, std::ostream& out);

}  // namespace critsys
