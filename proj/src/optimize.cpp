#include "critsys/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "critsys/dynamics.hpp"
#include "critsys/errors.hpp"

namespace critsys {

namespace {

// Eigenvalues are needed well below the Armijo decrease near convergence.
constexpr SpectralOptions kTightSpectral{1e-14, 200};
constexpr int kMaxHalvings = 40;

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] * b[i];
  return trapezoid(ab);
}

std::vector<double> squared_sum(const std::vector<EigenPair>& pairs) {
  std::vector<double> s(pairs.front().eigenfunction.size(), 0.0);
  for (const auto& e : pairs) {
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += e.eigenfunction[j] * e.eigenfunction[j];
  }
  return s;
}

// d lambda / d q_j per unit trapezoid weight. The shooting solver treats q as
// piecewise linear, so the exact nodal derivative is the integral of E^2
// against the hat function at x_j; the plain nodal E^2 is off by O(h^2),
// which is enough to break the line search near convergence.
std::vector<double> nodal_gradient(const std::vector<EigenPair>& pairs) {
  const auto s = squared_sum(pairs);
  std::vector<double> g(s);
  for (std::size_t j = 1; j + 1 < s.size(); ++j) g[j] = (s[j - 1] + 10.0 * s[j] + s[j + 1]) / 12.0;
  return g;
}

double lambda_sum(const std::vector<EigenPair>& pairs) {
  double s = 0.0;
  for (const auto& e : pairs) s += e.lambda;
  return s;
}

void project_to_sphere(PotentialGrid& q, double r) {
  const double norm = q.lp_norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ConvergenceError("iterate collapsed to zero potential");
  for (double& x : q.values) x *= r / norm;
}

// g with its component along the sphere normal phi_p(q) removed; vanishes
// exactly at critical points of the constrained problem.
std::vector<double> tangential(const std::vector<double>& g, const PotentialGrid& q) {
  const auto n = phi(q.values, q.p);
  const double nn = inner(n, n);
  const double c = nn > 0.0 ? inner(g, n) / nn : 0.0;
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = g[i] - c * n[i];
  return t;
}

double l2_norm(const std::vector<double>& f) { return std::sqrt(std::max(inner(f, f), 0.0)); }

// Smooth random start: the first step direction plus a few sine modes of
// comparable size. Restart 0 is unperturbed.
PotentialGrid initial_potential(const OptimizeProblem& prob, const OptimizerConfig& cfg, int restart,
                                const std::vector<double>& g0, double sign) {
  PotentialGrid q;
  q.p = prob.p;
  q.values.resize(g0.size());
  for (std::size_t j = 0; j < g0.size(); ++j) q.values[j] = sign * g0[j];
  if (restart > 0) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(restart));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, 6> a{};
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = normal(rng) / static_cast<double>(k + 1);
    std::vector<double> pert(g0.size(), 0.0);
    for (std::size_t j = 0; j < pert.size(); ++j) {
      const double x = q.x(static_cast<int>(j));
      for (std::size_t k = 0; k < a.size(); ++k) pert[j] += a[k] * std::sin(std::numbers::pi * (k + 1) * x);
    }
    const double scale = std::sqrt(inner(g0, g0) / std::max(inner(pert, pert), 1e-300));
    for (std::size_t j = 0; j < pert.size(); ++j) q.values[j] += scale * pert[j];
  }
  project_to_sphere(q, prob.r);
  return q;
}

Branch run_restart(const OptimizeProblem& prob, const OptimizerConfig& cfg, int restart) {
  const double sign = prob.sense == Sense::Min ? -1.0 : 1.0;
  const double ps = prob.conjugate_exponent();
  const auto g0 = squared_sum(eigenpairs(PotentialGrid::constant(cfg.n, 0.0, prob.p), prob.m, kTightSpectral));

  Branch b;
  b.restart = restart;
  b.q = initial_potential(prob, cfg, restart, g0, sign);
  auto pairs = eigenpairs(b.q, prob.m, kTightSpectral);
  b.value = lambda_sum(pairs);
  b.trace.push_back(b.value);

  for (b.iterations = 0; b.iterations < cfg.max_iterations; ++b.iterations) {
    const auto g = nodal_gradient(pairs);
    b.tangential_gradient = l2_norm(tangential(g, b.q));
    if (b.tangential_gradient <= cfg.gradient_tol) {
      b.converged = true;
      return b;
    }
    const double noise = 1e-13 * (1.0 + std::abs(b.value));
    const double decrease = cfg.armijo * b.tangential_gradient * b.tangential_gradient;
    const auto dual = phi(b.q.values, prob.p);
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < kMaxHalvings && !accepted; ++halving, t *= 0.5) {
      // Step in phi_p(q) rather than q: a raw step in q followed by radial
      // rescaling stalls where g is parallel to q, which is only critical for p = 2.
      PotentialGrid trial = b.q;
      for (std::size_t j = 0; j < g.size(); ++j) trial.values[j] = dual[j] + sign * t * g[j];
      trial.values = phi(trial.values, ps);
      project_to_sphere(trial, prob.r);
      auto trial_pairs = eigenpairs(trial, prob.m, kTightSpectral);
      const double value = lambda_sum(trial_pairs);
      if (sign * (value - b.value) >= t * decrease - noise) {
        b.q = std::move(trial);
        pairs = std::move(trial_pairs);
        b.value = value;
        b.trace.push_back(value);
        accepted = true;
      }
    }
    if (!accepted) return b;  // stalled: line search found no admissible step
  }
  b.tangential_gradient = l2_norm(tangential(nodal_gradient(pairs), b.q));
  b.converged = b.tangential_gradient <= cfg.gradient_tol;
  return b;
}

std::string fmt17(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

void OptimizeProblem::validate() const {
  if (m < 2) throw ContractViolation(fmt::format("m must be >= 2 (got {})", m));
  if (!std::isfinite(p) || !(p > 1.0)) throw ContractViolation(fmt::format("p must be a finite number > 1 (got {})", p));
  if (!std::isfinite(r) || !(r > 0.0)) throw ContractViolation(fmt::format("r must be a finite positive number (got {})", r));
}

void OptimizerConfig::validate() const {
  if (n < 16) throw ContractViolation(fmt::format("grid must have at least 16 cells (got {})", n));
  if (restarts < 1) throw ContractViolation("restarts must be >= 1");
  if (max_iterations < 1) throw ContractViolation("max_iterations must be >= 1");
  if (!(gradient_tol > 0.0)) throw ContractViolation("gradient_tol must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ContractViolation("armijo must lie in (0, 1)");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
}

std::vector<double> phi(const std::vector<double>& q, double p) {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = q[i] == 0.0 ? 0.0 : std::pow(std::abs(q[i]), p - 2.0) * q[i];
  }
  return out;
}

OptimizeResult optimize_sum(const OptimizeProblem& prob, const OptimizerConfig& cfg) {
  prob.validate();
  cfg.validate();

  std::vector<Branch> branches(static_cast<std::size_t>(cfg.restarts));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < cfg.restarts; i = next++) {
      try {
        branches[static_cast<std::size_t>(i)] = run_restart(prob, cfg, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min(cfg.threads, cfg.restarts);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const double sign = prob.sense == Sense::Min ? -1.0 : 1.0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < branches.size(); ++i) {
    if (sign * branches[i].value > sign * branches[best].value) best = i;
  }
  OptimizeResult res;
  res.q = branches[best].q;
  res.value = branches[best].value;
  res.converged = branches[best].converged;
  res.best_restart = static_cast<int>(best);
  res.branches = std::move(branches);
  return res;
}

CriticalSolution extract_critical(const PotentialGrid& q, const OptimizeProblem& prob, std::optional<double> value) {
  prob.validate();
  q.validate();
  const auto pairs = eigenpairs(q, prob.m, kTightSpectral);
  const auto s = squared_sum(pairs);
  const auto f = phi(q.values, prob.p);

  CriticalSolution sol;
  sol.q = q;
  sol.q.p = prob.p;
  sol.c = inner(f, s) / inner(s, s);
  if (!(std::abs(sol.c) >= 1e-12)) {
    throw ExtractionError(fmt::format("Lagrange multiplier {} is degenerate", fmt17(sol.c)));
  }
  sol.epsilon = sol.c > 0.0 ? 1 : -1;
  for (std::size_t j = 0; j < s.size(); ++j) sol.fit_residual = std::max(sol.fit_residual, std::abs(f[j] - sol.c * s[j]));
  const double scale = std::sqrt(std::abs(sol.c));
  for (const auto& e : pairs) {
    sol.mu.push_back(e.lambda);
    std::vector<double> u(e.eigenfunction);
    for (double& x : u) x *= scale;
    sol.u.push_back(std::move(u));
  }
  sol.sum = value ? *value : lambda_sum(pairs);
  return sol;
}

CriticalSolution extract_critical(const OptimizeResult& result, const OptimizeProblem& prob) {
  return extract_critical(result.q, prob, result.value);
}

bool CriticalReport::ode_ok() const {
  return std::all_of(ode_residual.begin(), ode_residual.end(), [](double r) { return r <= kOdeTol; });
}

bool CriticalReport::boundary_ok() const {
  return std::all_of(boundary.begin(), boundary.end(),
                     [](const auto& b) { return std::abs(b[0]) <= kTol && std::abs(b[1]) <= kTol; });
}

bool CriticalReport::all_pass() const {
  return ode_ok() && boundary_ok() && normalization_ok() && sum_ok() && potential_ok() && hamiltonian_ok() &&
         norm_residual <= 1e-6;
}

CriticalReport verify_critical(const CriticalSolution& sol, const OptimizeProblem& prob) {
  prob.validate();
  const int n = sol.q.n();
  const std::size_t m = sol.u.size();
  const double h = sol.q.h();
  const double ps = prob.conjugate_exponent();

  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& u : sol.u) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += u[j] * u[j];
  }
  std::vector<double> qq(w.size()), wp(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    qq[j] = sol.epsilon * std::pow(w[j], ps - 1.0);
    wp[j] = std::pow(w[j], ps);
  }

  CriticalReport rep;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = sol.u[i];
    double res = 0.0;
    for (int j = 1; j < n; ++j) {
      const double upp = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
      res = std::max(res, std::abs(-upp + qq[j] * u[j] - sol.mu[i] * u[j]));
    }
    rep.ode_residual.push_back(res);
    rep.boundary.push_back({u.front(), u.back()});
  }
  const double rp = std::pow(prob.r, prob.p);
  rep.normalization_residual = std::abs(trapezoid(wp) - rp) / rp;
  double mu_sum = 0.0;
  for (double x : sol.mu) mu_sum += x;
  rep.sum_residual = std::abs(mu_sum - sol.sum);
  for (std::size_t j = 0; j < w.size(); ++j) {
    rep.potential_residual = std::max(rep.potential_residual, std::abs(sol.q.values[j] - qq[j]));
  }
  PotentialGrid q = sol.q;
  q.p = prob.p;
  rep.norm_residual = std::abs(q.lp_norm() - prob.r) / prob.r;

  // For integer p* the boundary-value solution is an orbit of the polynomial
  // Hamiltonian system; check it against that vector field.
  const double kr = std::round(ps);
  if (std::abs(ps - kr) < 1e-9 && kr >= 2.0) {
    rep.k = static_cast<int>(kr);
    const auto params = SystemParams::make(*rep.k, sol.epsilon, sol.mu);
    double res = 0.0;
    PhaseState st{std::vector<double>(m), std::vector<double>(m)};
    for (int j = 1; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        st.u[i] = sol.u[i][j];
        st.v[i] = (sol.u[i][j + 1] - sol.u[i][j - 1]) / (2.0 * h);
      }
      const auto f = vector_field(params, st);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& u = sol.u[i];
        const double upp = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
        res = std::max({res, std::abs(upp - f.v[i]), std::abs(st.v[i] - f.u[i])});
      }
    }
    rep.hamiltonian_residual = res;
  }
  return rep;
}

std::string CriticalReport::to_text() const {
  auto flag = [](bool ok) { return ok ? "pass" : "fail"; };
  std::string out;
  for (std::size_t i = 0; i < ode_residual.size(); ++i) {
    out += fmt::format("ode_residual[{}]: {}\n", i + 1, fmt17(ode_residual[i]));
  }
  out += fmt::format("ode: {}\n", flag(ode_ok()));
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    out += fmt::format("boundary[{}]: {} {}\n", i + 1, fmt17(boundary[i][0]), fmt17(boundary[i][1]));
  }
  out += fmt::format("boundary: {}\n", flag(boundary_ok()));
  out += fmt::format("normalization_residual: {}\nnormalization: {}\n", fmt17(normalization_residual),
                     flag(normalization_ok()));
  out += fmt::format("sum_residual: {}\nsum: {}\n", fmt17(sum_residual), flag(sum_ok()));
  out += fmt::format("potential_residual: {}\npotential: {}\n", fmt17(potential_residual), flag(potential_ok()));
  out += fmt::format("norm_residual: {}\nnorm: {}\n", fmt17(norm_residual), flag(norm_residual <= 1e-6));
  if (hamiltonian_residual) {
    out += fmt::format("hamiltonian_k: {}\nhamiltonian_residual: {}\nhamiltonian: {}\n", *k,
                       fmt17(*hamiltonian_residual), flag(hamiltonian_ok()));
  }
  out += fmt::format("all: {}\n", flag(all_pass()));
  return out;
}

void write_critical_csv(const CriticalSolution& sol, std::ostream& out) {
  out << "x";
  for (std::size_t i = 0; i < sol.u.size(); ++i) out << ",u" << i + 1;
  out << '\n';
  for (int j = 0; j <= sol.q.n(); ++j) {
    out << fmt17(sol.q.x(j));
    for (const auto& u : sol.u) out << ',' << fmt17(u[static_cast<std::size_t>(j)]);
    out << '\n';
  }
}

}  // namespace critsys
