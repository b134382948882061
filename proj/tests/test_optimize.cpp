#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "critsys/errors.hpp"
#include "critsys/optimize.hpp"

using namespace critsys;

namespace {

constexpr double kPi = std::numbers::pi;

OptimizeProblem problem(Sense sense, double r = 1.0, double p = 2.0, int m = 2) {
  OptimizeProblem prob;
  prob.m = m;
  prob.p = p;
  prob.r = r;
  prob.sense = sense;
  return prob;
}

OptimizerConfig config(int n = 512, int restarts = 2) {
  OptimizerConfig cfg;
  cfg.n = n;
  cfg.restarts = restarts;
  cfg.seed = 7;
  return cfg;
}

// Random smooth potential rescaled onto ||q||_p = r.
PotentialGrid random_sphere_point(std::mt19937_64& rng, int n, double p, double r) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(8), b(8);
  for (int k = 0; k < 8; ++k) {
    a[k] = normal(rng) / (k + 1);
    b[k] = normal(rng) / (k + 1);
  }
  auto q = PotentialGrid::sample(
      n,
      [&](double x) {
        double s = 0.0;
        for (int k = 0; k < 8; ++k) s += a[k] * std::cos(kPi * k * x) + b[k] * std::sin(kPi * (k + 1) * x);
        return s;
      },
      p);
  const double norm = q.lp_norm();
  for (double& v : q.values) v *= r / norm;
  return q;
}

}  // namespace

TEST_CASE("problem and config validation") {
  CHECK_THROWS_AS(problem(Sense::Min, 1.0, 2.0, 1).validate(), ContractViolation);
  CHECK_THROWS_AS(problem(Sense::Min, 1.0, 1.0).validate(), ContractViolation);
  CHECK_THROWS_AS(problem(Sense::Min, 0.0).validate(), ContractViolation);
  CHECK_THROWS_AS(problem(Sense::Min, NAN).validate(), ContractViolation);
  CHECK_NOTHROW(problem(Sense::Max, 2.0, 1.5, 4).validate());
  auto cfg = config();
  cfg.restarts = 0;
  CHECK_THROWS_AS(optimize_sum(problem(Sense::Min), cfg), ContractViolation);
  CHECK_EQ(problem(Sense::Min, 1.0, 1.5).conjugate_exponent(), doctest::Approx(3.0));
}

TEST_CASE("phi_p and phi_p* are inverse") {
  std::vector<double> x{-2.5, -0.3, 0.0, 1e-3, 0.7, 4.0};
  for (double p : {1.25, 1.5, 2.0, 3.0, 7.0}) {
    const auto back = phi(phi(x, p), p / (p - 1.0));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("small radius matches first-order perturbation") {
  // E_i = sqrt2 sin(i pi x) at q = 0, so || E_1^2 + E_2^2 ||_2 = sqrt 5.
  const double r = 1e-3;
  const double base = 5.0 * kPi * kPi;
  const auto lo = optimize_sum(problem(Sense::Min, r), config());
  const auto hi = optimize_sum(problem(Sense::Max, r), config());
  CHECK(lo.converged);
  CHECK(hi.converged);
  CHECK(lo.value >= base - 0.01);
  CHECK(lo.value <= base);
  CHECK(lo.value == doctest::Approx(base - r * std::sqrt(5.0)).epsilon(1e-7));
  CHECK(hi.value == doctest::Approx(base + r * std::sqrt(5.0)).epsilon(1e-7));

  // No sampled point of the ball does better.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto q = random_sphere_point(rng, 512, 2.0, r * shrink(rng));
    const double v = eigen_sum(q, 2);
    CHECK(v >= lo.value - 1e-9);
    CHECK(v <= hi.value + 1e-9);
  }
}

TEST_CASE("vanishing radius recovers the free sum") {
  const auto res = optimize_sum(problem(Sense::Min, 1e-9, 2.0, 3), config(512, 1));
  CHECK(res.value == doctest::Approx(14.0 * kPi * kPi).epsilon(1e-9));
}

TEST_CASE("min and max bracket the free sum strictly") {
  const double base = eigen_sum(PotentialGrid::constant(512, 0.0), 2);
  const auto lo = optimize_sum(problem(Sense::Min), config());
  const auto hi = optimize_sum(problem(Sense::Max), config());
  CHECK(lo.value < base - 1.0);
  CHECK(hi.value > base + 1.0);
}

TEST_CASE("iterates stay on the sphere and objective is monotone") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (Sense s : {Sense::Min, Sense::Max}) {
      const auto prob = problem(s, 1.0, p);
      const auto res = optimize_sum(prob, config());
      CHECK(res.converged);
      REQUIRE_EQ(res.branches.size(), 2u);
      for (const auto& b : res.branches) {
        CHECK(b.q.lp_norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.tangential_gradient <= 1e-6);
        const double sign = s == Sense::Min ? -1.0 : 1.0;
        for (std::size_t i = 1; i < b.trace.size(); ++i) {
          CHECK(sign * (b.trace[i] - b.trace[i - 1]) >= -1e-13 * (1.0 + std::abs(b.trace[i - 1])));
        }
      }
      // Both restarts find the same value.
      CHECK(res.branches[0].value == doctest::Approx(res.branches[1].value).epsilon(1e-10));
    }
  }
}

TEST_CASE("non-convergence is flagged, not thrown") {
  auto cfg = config(256, 1);
  cfg.max_iterations = 1;
  OptimizeResult res;
  CHECK_NOTHROW(res = optimize_sum(problem(Sense::Min), cfg));
  CHECK_FALSE(res.converged);
  CHECK(res.branches[0].tangential_gradient > 1e-6);
}

TEST_CASE("restarts are independent of thread count") {
  auto cfg = config(256, 3);
  const auto a = optimize_sum(problem(Sense::Max), cfg);
  cfg.threads = 3;
  const auto b = optimize_sum(problem(Sense::Max), cfg);
  CHECK_EQ(a.best_restart, b.best_restart);
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    CHECK_EQ(a.branches[i].value, b.branches[i].value);
    CHECK(a.branches[i].q.values == b.branches[i].q.values);
  }
}

TEST_CASE("extracted multiplier sign follows the sense") {
  for (Sense s : {Sense::Min, Sense::Max}) {
    const auto prob = problem(s);
    const auto res = optimize_sum(prob, config());
    const auto sol = extract_critical(res, prob);
    CHECK_EQ(sol.epsilon, s == Sense::Min ? -1 : 1);
    CHECK(sol.c * sol.epsilon > 0.0);
    CHECK(sol.fit_residual <= 1e-3);
    CHECK_EQ(sol.mu.size(), 2u);
    CHECK_EQ(sol.sum, res.value);
  }
}

TEST_CASE("degenerate multiplier raises") {
  // A vanishing potential carries no multiplier information.
  const auto q = PotentialGrid::constant(512, 1e-14);
  CHECK_THROWS_AS(extract_critical(q, problem(Sense::Min)), ExtractionError);
}

TEST_CASE("critical system verified end to end") {
  const auto prob = problem(Sense::Min);
  const auto res = optimize_sum(prob, config(2048, 1));
  const auto sol = extract_critical(res, prob);
  const auto rep = verify_critical(sol, prob);
  CHECK(rep.ode_ok());
  CHECK(rep.boundary_ok());
  CHECK(rep.normalization_ok());
  CHECK(rep.sum_ok());
  CHECK(rep.potential_ok());
  REQUIRE(rep.k.has_value());
  CHECK_EQ(*rep.k, 2);
  CHECK(rep.hamiltonian_ok());
  CHECK(rep.all_pass());
  CHECK(rep.to_text().find("all: pass") != std::string::npos);

  SUBCASE("boundary negative control") {
    auto bad = sol;
    bad.u[0].front() = 0.01;
    const auto r = verify_critical(bad, prob);
    CHECK_FALSE(r.boundary_ok());
    CHECK_FALSE(r.all_pass());
  }
  SUBCASE("sum negative control") {
    auto bad = sol;
    bad.sum += 1e-3;
    const auto r = verify_critical(bad, prob);
    CHECK_FALSE(r.sum_ok());
    CHECK(r.to_text().find("sum: fail") != std::string::npos);
  }
}

TEST_CASE("integer conjugate exponent matches the Hamiltonian vector field") {
  // p = 3/2 gives p* = 3, the k = 3 member of the Hamiltonian family.
  const auto prob = problem(Sense::Max, 1.0, 1.5);
  const auto sol = extract_critical(optimize_sum(prob, config(2048, 1)), prob);
  const auto rep = verify_critical(sol, prob);
  REQUIRE(rep.k.has_value());
  CHECK_EQ(*rep.k, 3);
  CHECK(*rep.hamiltonian_residual <= 1e-3);
  CHECK(rep.all_pass());
}

TEST_CASE("non-integer conjugate exponent skips the Hamiltonian check") {
  const auto prob = problem(Sense::Min, 1.0, 2.5);
  const auto sol = extract_critical(optimize_sum(prob, config(256, 1)), prob);
  const auto rep = verify_critical(sol, prob);
  CHECK_FALSE(rep.k.has_value());
  CHECK_FALSE(rep.hamiltonian_residual.has_value());
}

TEST_CASE("critical CSV layout") {
  const auto prob = problem(Sense::Min);
  const auto sol = extract_critical(optimize_sum(prob, config(64, 1)), prob);
  std::ostringstream out;
  write_critical_csv(sol, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK_EQ(line, "x,u1,u2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK_EQ(rows, 65);
}
