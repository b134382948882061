#pragma once

// Dirichlet problem -psi'' + q psi = lambda psi on [0, 1], psi(0) = psi(1) = 0,
// solved by Pruefer-angle shooting on a uniform grid.

#include <functional>
#include <iosfwd>
#include <vector>

namespace critsys {

/// q sampled at the n+1 nodes x_i = i/n; p is the Lebesgue exponent used by lp_norm.
struct PotentialGrid {
  std::vector<double> values;
  double p = 2.0;

  int n() const noexcept { return static_cast<int>(values.size()) - 1; }
  double h() const noexcept { return 1.0 / n(); }
  double x(int i) const noexcept { return static_cast<double>(i) / n(); }

  static PotentialGrid constant(int n, double c, double p = 2.0);
  static PotentialGrid sample(int n, const std::function<double(double)>& f, double p = 2.0);

  /// Throws ContractViolation unless n >= 16, p > 1 and all values are finite.
  void validate() const;
  /// (trapezoid of |q|^p)^(1/p)
  double lp_norm() const;
};

/// Composite trapezoid rule on the uniform grid of [0, 1].
double trapezoid(const std::vector<double>& f);

struct SpectralOptions {
  double rel_tol = 1e-10;
  int max_iterations = 200;
};

/// lambda_1 < ... < lambda_m. Throws ConvergenceError if a root search stalls.
std::vector<double> dirichlet_eigs(const PotentialGrid& q, int m, const SpectralOptions& opts = {});

struct EigenPair {
  int index = 1;
  double lambda = 0.0;
  std::vector<double> eigenfunction;  // on the grid nodes

  /// Sign changes strictly inside (0, 1).
  int nodes() const;
};

/// i-th eigenpair, L2-normalized by the trapezoid rule with E'(0) > 0.
EigenPair eigenfunction(const PotentialGrid& q, int i, const SpectralOptions& opts = {});

/// Eigenpairs 1..m.
std::vector<EigenPair> eigenpairs(const PotentialGrid& q, int m, const SpectralOptions& opts = {});

double eigen_sum(const PotentialGrid& q, int m, const SpectralOptions& opts = {});

/// Max over interior nodes of |-E'' + q E - lambda E| with centered differences.
double ode_residual(const PotentialGrid& q, const EigenPair& pair);

struct FrechetComparison {
  double finite_difference = 0.0;  // (lambda_m(q + h xi) - lambda_m(q - h xi)) / (2h)
  double analytic = 0.0;           // integral of xi E_m^2
};

FrechetComparison frechet_check(const PotentialGrid& q, int m, const PotentialGrid& xi, double h);

/// CSV with header x,q. The x column must be the uniform grid on [0, 1].
PotentialGrid read_potential_csv(std::istream& in, double p = 2.0);
void write_potential_csv(const PotentialGrid& q, std::ostream& out);
/// CSV with header i,lambda.
void write_eigs_csv(const std::vector<double>& lambdas, std::ostream& out);

}  // namespace critsys
