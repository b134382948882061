#include "critsys/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

constexpr double kPi = std::numbers::pi;

// Scaled Pruefer variables psi = rho sin(theta), psi' = S rho cos(theta):
//   theta'    = S cos^2 + (lambda - q)/S sin^2
//   log(rho)' = (S - (lambda - q)/S) sin cos
// Zeros of psi are exactly the crossings of theta through multiples of pi for
// any S > 0; S = sqrt(lambda - mean q) keeps theta' nearly constant so RK4
// stays accurate for high modes.
struct Phase {
  double theta = 0.0;
  double log_rho = 0.0;
};

double mean_potential(const PotentialGrid& q) { return trapezoid(q.values); }

double pruefer_scale(double lambda, double qbar) { return std::sqrt(std::max(lambda - qbar, 1.0)); }

Phase rhs(const Phase& s, double lambda, double q, double scale) {
  const double sn = std::sin(s.theta), cs = std::cos(s.theta);
  const double w = (lambda - q) / scale;
  return {scale * cs * cs + w * sn * sn, (scale - w) * sn * cs};
}

Phase axpy(const Phase& a, double t, const Phase& b) { return {a.theta + t * b.theta, a.log_rho + t * b.log_rho}; }

// Classical RK4 across one cell, with q linear in between.
Phase rk4_cell(const Phase& s, double lambda, double q0, double q1, double h, double scale) {
  const double qm = 0.5 * (q0 + q1);
  const Phase k1 = rhs(s, lambda, q0, scale);
  const Phase k2 = rhs(axpy(s, 0.5 * h, k1), lambda, qm, scale);
  const Phase k3 = rhs(axpy(s, 0.5 * h, k2), lambda, qm, scale);
  const Phase k4 = rhs(axpy(s, h, k3), lambda, q1, scale);
  return {s.theta + h / 6 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta),
          s.log_rho + h / 6 * (k1.log_rho + 2 * k2.log_rho + 2 * k3.log_rho + k4.log_rho)};
}

// theta(1; lambda); only the angle is needed for root finding.
double end_angle(const PotentialGrid& q, double lambda, double qbar) {
  const double h = q.h();
  const double scale = pruefer_scale(lambda, qbar);
  double th = 0.0;
  auto f = [&](double t, double qq) {
    const double sn = std::sin(t), cs = std::cos(t);
    return scale * cs * cs + (lambda - qq) / scale * sn * sn;
  };
  for (int i = 0; i < q.n(); ++i) {
    const double q0 = q.values[static_cast<std::size_t>(i)];
    const double q1 = q.values[static_cast<std::size_t>(i) + 1];
    const double qm = 0.5 * (q0 + q1);
    const double k1 = f(th, q0);
    const double k2 = f(th + 0.5 * h * k1, qm);
    const double k3 = f(th + 0.5 * h * k2, qm);
    const double k4 = f(th + h * k3, q1);
    th += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return th;
}

// Solves theta(1; lambda) = j pi by the Illinois variant of regula falsi,
// falling back to bisection when an update leaves the inner half of the bracket.
double solve_eigenvalue(const PotentialGrid& q, int j, double qmin, double qmax, const SpectralOptions& opts) {
  const double qbar = mean_potential(q);
  const double target = j * kPi;
  const double base = j * j * kPi * kPi;
  double lo = base + qmin, hi = base + qmax;
  double pad = 1e-6 * (1.0 + std::abs(base)) + 1.0;
  double flo = end_angle(q, lo, qbar) - target;
  double fhi = end_angle(q, hi, qbar) - target;
  for (int tries = 0; flo > 0 && tries < 60; ++tries, pad *= 2) {
    lo -= pad;
    flo = end_angle(q, lo, qbar) - target;
  }
  for (int tries = 0; fhi < 0 && tries < 60; ++tries, pad *= 2) {
    hi += pad;
    fhi = end_angle(q, hi, qbar) - target;
  }
  if (flo > 0 || fhi < 0) throw ConvergenceError(fmt::format("could not bracket eigenvalue {}", j));
  if (flo == 0) return lo;
  if (fhi == 0) return hi;

  int side = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (hi - lo <= opts.rel_tol * std::max(1.0, std::abs(0.5 * (lo + hi)))) return 0.5 * (lo + hi);
    double mid = (lo * fhi - hi * flo) / (fhi - flo);
    const double width = hi - lo;
    if (!(mid > lo + 0.01 * width && mid < hi - 0.01 * width)) mid = 0.5 * (lo + hi);
    const double fm = end_angle(q, mid, qbar) - target;
    if (fm == 0) return mid;
    if (fm < 0) {
      lo = mid;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  throw ConvergenceError(fmt::format("eigenvalue {} did not converge in {} iterations", j, opts.max_iterations));
}

}  // namespace

PotentialGrid PotentialGrid::constant(int n, double c, double p) {
  PotentialGrid q{std::vector<double>(static_cast<std::size_t>(n) + 1, c), p};
  q.validate();
  return q;
}

PotentialGrid PotentialGrid::sample(int n, const std::function<double(double)>& f, double p) {
  PotentialGrid q;
  q.p = p;
  q.values.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) q.values[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
  q.validate();
  return q;
}

void PotentialGrid::validate() const {
  if (n() < 16) throw ContractViolation(fmt::format("potential grid needs n >= 16 (got {})", n()));
  if (!(p > 1.0) || !std::isfinite(p)) throw ContractViolation(fmt::format("exponent p must lie in (1, inf) (got {})", p));
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractViolation("potential has non-finite values");
  }
}

double trapezoid(const std::vector<double>& f) {
  if (f.size() < 2) throw ContractViolation("trapezoid rule needs at least two nodes");
  const double h = 1.0 / static_cast<double>(f.size() - 1);
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

double PotentialGrid::lp_norm() const {
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = std::pow(std::abs(values[i]), p);
  return std::pow(trapezoid(w), 1.0 / p);
}

std::vector<double> dirichlet_eigs(const PotentialGrid& q, int m, const SpectralOptions& opts) {
  q.validate();
  if (m < 1) throw ContractViolation("number of eigenvalues must be at least 1");
  const auto [mn, mx] = std::minmax_element(q.values.begin(), q.values.end());
  std::vector<double> out;
  for (int j = 1; j <= m; ++j) out.push_back(solve_eigenvalue(q, j, *mn, *mx, opts));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConvergenceError("eigenvalues are not strictly increasing; grid too coarse");
  }
  return out;
}

int EigenPair::nodes() const {
  int count = 0;
  int last = 0;
  for (std::size_t i = 1; i + 1 < eigenfunction.size(); ++i) {
    const double v = eigenfunction[i];
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

namespace {

EigenPair build_pair(const PotentialGrid& q, int i, double lambda) {
  EigenPair pair;
  pair.index = i;
  pair.lambda = lambda;
  pair.eigenfunction.resize(q.values.size());
  const double scale = pruefer_scale(lambda, mean_potential(q));
  Phase s;
  pair.eigenfunction[0] = 0.0;
  for (int c = 0; c < q.n(); ++c) {
    const auto ci = static_cast<std::size_t>(c);
    s = rk4_cell(s, lambda, q.values[ci], q.values[ci + 1], q.h(), scale);
    pair.eigenfunction[ci + 1] = std::exp(s.log_rho) * std::sin(s.theta);
  }
  std::vector<double> sq(pair.eigenfunction.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = pair.eigenfunction[k] * pair.eigenfunction[k];
  const double norm = std::sqrt(trapezoid(sq));
  for (double& v : pair.eigenfunction) v /= norm;
  return pair;
}

}  // namespace

EigenPair eigenfunction(const PotentialGrid& q, int i, const SpectralOptions& opts) {
  if (i < 1) throw ContractViolation("eigenfunction index must be at least 1");
  return build_pair(q, i, dirichlet_eigs(q, i, opts).back());
}

std::vector<EigenPair> eigenpairs(const PotentialGrid& q, int m, const SpectralOptions& opts) {
  const auto lambdas = dirichlet_eigs(q, m, opts);
  std::vector<EigenPair> out;
  for (int i = 1; i <= m; ++i) out.push_back(build_pair(q, i, lambdas[static_cast<std::size_t>(i) - 1]));
  return out;
}

double eigen_sum(const PotentialGrid& q, int m, const SpectralOptions& opts) {
  double s = 0;
  for (double l : dirichlet_eigs(q, m, opts)) s += l;
  return s;
}

double ode_residual(const PotentialGrid& q, const EigenPair& pair) {
  const double h = q.h();
  const auto& e = pair.eigenfunction;
  double worst = 0;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    const double second = (e[i - 1] - 2 * e[i] + e[i + 1]) / (h * h);
    worst = std::max(worst, std::abs(-second + (q.values[i] - pair.lambda) * e[i]));
  }
  return worst;
}

FrechetComparison frechet_check(const PotentialGrid& q, int m, const PotentialGrid& xi, double h) {
  if (!(h > 0)) throw ContractViolation("finite-difference step must be positive");
  if (xi.values.size() != q.values.size()) throw ContractViolation("direction must share the potential grid");
  SpectralOptions tight;
  tight.rel_tol = 1e-14;
  PotentialGrid plus = q, minus = q;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    plus.values[i] += h * xi.values[i];
    minus.values[i] -= h * xi.values[i];
  }
  FrechetComparison out;
  out.finite_difference =
      (dirichlet_eigs(plus, m, tight).back() - dirichlet_eigs(minus, m, tight).back()) / (2 * h);
  const auto pair = eigenfunction(q, m, tight);
  std::vector<double> w(q.values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = xi.values[i] * pair.eigenfunction[i] * pair.eigenfunction[i];
  out.analytic = trapezoid(w);
  return out;
}

PotentialGrid read_potential_csv(std::istream& in, double p) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInput("potential file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,q") throw ValidationError("potential file must start with the header x,q");
  std::vector<double> xs, qs;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError(fmt::format("row {}: expected two columns", row));
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      xs.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
      qs.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::logic_error&) {
      throw ValidationError(fmt::format("row {}: malformed number", row));
    }
  }
  if (qs.size() < 2) throw EmptyInput("potential file has fewer than two rows");
  const auto n = static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - static_cast<double>(i) / n) > 1e-9) {
      throw ValidationError(fmt::format("x column is not the uniform grid on [0, 1] (row {})", i + 2));
    }
  }
  PotentialGrid q{std::move(qs), p};
  q.validate();
  return q;
}

void write_potential_csv(const PotentialGrid& q, std::ostream& out) {
  out << "x,q\n";
  for (int i = 0; i <= q.n(); ++i) out << fmt::format("{:.17g},{:.17g}\n", q.x(i), q.values[static_cast<std::size_t>(i)]);
}

void write_eigs_csv(const std::vector<double>& lambdas, std::ostream& out) {
  out << "i,lambda\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i) out << fmt::format("{},{:.17g}\n", i + 1, lambdas[i]);
}

}  // namespace critsys
