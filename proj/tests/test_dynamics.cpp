#include <doctest.h>

#include <cmath>
#include <random>

#include "critsys/dynamics.hpp"
#include "critsys/errors.hpp"

using namespace critsys;

namespace {

struct Draw {
  SystemParams params;
  PhaseState state;
};

Draw random_draw(std::mt19937_64& rng, int max_m = 4, int max_k = 5) {
  std::uniform_int_distribution<int> md(1, max_m), kd(2, max_k);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  const int m = md(rng);
  std::vector<double> mu(static_cast<std::size_t>(m));
  for (auto& v : mu) v = 2 * x(rng);
  Draw d{SystemParams::make(kd(rng), (rng() & 1) ? 1 : -1, mu), {}};
  for (int i = 0; i < m; ++i) {
    d.state.u.push_back(x(rng));
    d.state.v.push_back(x(rng));
  }
  return d;
}

}  // namespace

TEST_CASE("Hamiltonian values") {
  const auto p = SystemParams::make(2, 1, {1, 2});
  CHECK(hamiltonian_value(p, PhaseState{{1, 0}, {0, 1}}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(hamiltonian_value(p, PhaseState{{0, 0}, {0, 0}}) == 0.0);
  CHECK(hamiltonian_value(SystemParams::make(3, -1, {0}), PhaseState{{1}, {0}}) == doctest::Approx(1.0 / 6));
  CHECK_THROWS_AS(hamiltonian_value(p, PhaseState{{1}, {0}}), ContractViolation);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SystemParams::make(1, 1, {1}), ContractViolation);
  CHECK_THROWS_AS(SystemParams::make(2, 0, {1}), ContractViolation);
  CHECK_THROWS_AS(SystemParams::make(2, 1, {}), ContractViolation);
  CHECK_THROWS_AS(SystemParams::make(2, 1, {INFINITY}), ContractViolation);
}

TEST_CASE("vector field") {
  auto f = vector_field(SystemParams::make(2, 1, {1, 2}), PhaseState{{1, 0}, {0, 1}});
  CHECK(f.u == std::vector<double>{0, 1});
  CHECK(f.v == std::vector<double>{0, 0});
  f = vector_field(SystemParams::make(2, 1, {1, 2}), PhaseState{{0, 0}, {0, 0}});
  CHECK(f.u == std::vector<double>{0, 0});
  CHECK(f.v == std::vector<double>{0, 0});
  f = vector_field(SystemParams::make(2, 1, {4}), PhaseState{{2}, {0}});
  CHECK(f.u[0] == 0.0);
  CHECK(f.v[0] == 0.0);
}

TEST_CASE("vector field is the symplectic gradient of H") {
  std::mt19937_64 rng(1);
  const double h = 1e-6;
  for (int n = 0; n < 200; ++n) {
    auto d = random_draw(rng);
    const auto f = vector_field(d.params, d.state);
    for (std::size_t i = 0; i < d.state.u.size(); ++i) {
      auto plus = d.state, minus = d.state;
      plus.v[i] += h;
      minus.v[i] -= h;
      const double dhdv = (hamiltonian_value(d.params, plus) - hamiltonian_value(d.params, minus)) / (2 * h);
      plus = minus = d.state;
      plus.u[i] += h;
      minus.u[i] -= h;
      const double dhdu = (hamiltonian_value(d.params, plus) - hamiltonian_value(d.params, minus)) / (2 * h);
      CHECK(std::abs(f.u[i] - dhdv) <= 1e-6 * std::max(1.0, std::abs(dhdv)));
      CHECK(std::abs(f.v[i] + dhdu) <= 1e-6 * std::max(1.0, std::abs(dhdu)));
    }
  }
}

TEST_CASE("observable gradients match finite differences") {
  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (int n = 0; n < 100; ++n) {
    auto d = random_draw(rng);
    std::vector<Observable> obs = {Observable::hamiltonian()};
    if (d.params.m >= 2) obs.push_back(Observable::angular(d.params.m - 1));
    obs.push_back(Observable::deformation(3.5, DeformationForm::AsPrinted));
    obs.push_back(Observable::deformation(-3.5, DeformationForm::SignCorrected));
    for (const auto& o : obs) {
      const auto g = observable_gradient(o, d.params, d.state);
      for (std::size_t i = 0; i < d.state.u.size(); ++i) {
        auto plus = d.state, minus = d.state;
        plus.u[i] += h;
        minus.u[i] -= h;
        const double fd = (eval_observable(o, d.params, plus) - eval_observable(o, d.params, minus)) / (2 * h);
        CHECK(std::abs(g.du[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        plus = minus = d.state;
        plus.v[i] += h;
        minus.v[i] -= h;
        const double fdv = (eval_observable(o, d.params, plus) - eval_observable(o, d.params, minus)) / (2 * h);
        CHECK(std::abs(g.dv[i] - fdv) <= 1e-6 * std::max(1.0, std::abs(fdv)));
      }
    }
  }
}

TEST_CASE("Poisson bracket examples") {
  const auto p = SystemParams::make(2, 1, {1, 2});
  const PhaseState x{{1, 1}, {0, 0}};
  CHECK(poisson_bracket(Observable::hamiltonian(), Observable::hamiltonian(), p, x) == 0.0);
  CHECK(poisson_bracket(Observable::hamiltonian(), Observable::angular(1), p, x) == doctest::Approx(-1.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(-1, 1);
  for (int k : {2, 3, 5}) {
    const auto eq = SystemParams::make(k, -1, {0.7, 0.7, 0.7});
    for (int n = 0; n < 100; ++n) {
      const PhaseState s{{r(rng), r(rng), r(rng)}, {r(rng), r(rng), r(rng)}};
      for (int i = 1; i <= 2; ++i) {
        CHECK(std::abs(poisson_bracket(Observable::hamiltonian(), Observable::angular(i), eq, s)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("bracket closed form and antisymmetry") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(-1, 1);
  for (int n = 0; n < 100; ++n) {
    const auto p = SystemParams::make(2 + n % 4, (n % 2) ? 1 : -1, {r(rng), r(rng)});
    const PhaseState s{{r(rng), r(rng)}, {r(rng), r(rng)}};
    const double expected = s.u[0] * s.u[1] * (p.mu[0] - p.mu[1]);
    CHECK(std::abs(poisson_bracket(Observable::hamiltonian(), Observable::angular(1), p, s) - expected) <= 1e-10);
    const std::vector<Observable> obs = {Observable::hamiltonian(), Observable::angular(1), Observable::deformation(4.0),
                                         Observable::deformation(-4.0, DeformationForm::SignCorrected)};
    for (const auto& a : obs) {
      for (const auto& b : obs) {
        CHECK(std::abs(poisson_bracket(a, b, p, s) + poisson_bracket(b, a, p, s)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("user functions need a gradient for brackets") {
  const auto p = SystemParams::make(2, 1, {1, 2});
  const PhaseState x{{0.3, 0.1}, {0.2, -0.4}};
  UserFunction q{"u1", [](const PhaseState& s) { return s.u[0]; }, {}};
  CHECK_THROWS_AS(poisson_bracket(q, Observable::hamiltonian(), p, x), UnsupportedObservable);
  q.gradient = [](const PhaseState& s) {
    Gradient g{std::vector<double>(s.u.size(), 0.0), std::vector<double>(s.u.size(), 0.0)};
    g.du[0] = 1;
    return g;
  };
  // {u1, H} = -dH/dv1 = -v1
  CHECK(poisson_bracket(q, Observable::hamiltonian(), p, x) == doctest::Approx(-0.2));
}

TEST_CASE("observable values") {
  const auto p = SystemParams::make(2, 1, {1, 2});
  CHECK(eval_observable(Observable::angular(1), p, PhaseState{{1, 0}, {0, 1}}) == 1.0);
  CHECK(eval_observable(Observable::angular(1), p, PhaseState{{1, 1}, {1, 1}}) == 0.0);
  CHECK(eval_observable(Observable::deformation(0.0), p, PhaseState{{1, 0}, {0, 1}}) == doctest::Approx(-4.5));
  CHECK_THROWS_AS(eval_observable(Observable::deformation(2.0), p, PhaseState{{1, 0}, {0, 1}}), PoleError);
  CHECK_THROWS_AS(eval_observable(Observable::angular(2), p, PhaseState{{1, 0}, {0, 1}}), ContractViolation);
}

TEST_CASE("independence rank") {
  const auto p = SystemParams::make(3, 1, {0.5, 0.5});
  const std::vector<PhaseState> states = {{{0.3, -0.2}, {0.1, 0.7}}};
  const std::vector<Observable> h = {Observable::hamiltonian()};
  const std::vector<Observable> hi = {Observable::hamiltonian(), Observable::angular(1)};
  const std::vector<Observable> hh = {Observable::hamiltonian(), Observable::hamiltonian()};
  CHECK(independence_rank(h, p, states) == 1);
  CHECK(independence_rank(hi, p, states) == 2);
  CHECK(independence_rank(hh, p, states) == 1);
  CHECK_THROWS_AS(independence_rank({}, p, states), EmptyInput);
}

TEST_CASE("deformation integral commutes with H in the conserved form") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> r(-1, 1);
  for (int n = 0; n < 100; ++n) {
    const int eps = (n % 2) ? 1 : -1;
    const auto p = SystemParams::make(2, eps, {r(rng), 1.5 + r(rng), 3 + r(rng)});
    const PhaseState s{{r(rng), r(rng), r(rng)}, {r(rng), r(rng), r(rng)}};
    for (double sv : generic_spectral_values(p)) {
      const auto good = conserved_deformation(p, sv);
      CHECK(std::abs(poisson_bracket(Observable::hamiltonian(), good, p, s)) <= 1e-9);
    }
  }
  // The printed sign is not conserved for epsilon = +1.
  const auto p = SystemParams::make(2, 1, {0.1, 1.0});
  const PhaseState s{{0.3, 0.4}, {0.1, -0.2}};
  CHECK(std::abs(poisson_bracket(Observable::hamiltonian(), Observable::deformation(3.0), p, s)) > 1e-3);
}

TEST_CASE("complexified integral matches the printed form") {
  // The sign-corrected integral for epsilon = +1, evaluated at (-i u, i v),
  // equals the printed integral for epsilon = -1.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> r(-1, 1);
  const std::complex<double> i(0, 1);
  for (int n = 0; n < 50; ++n) {
    const std::vector<double> mu = {r(rng), 2 + r(rng)};
    const auto plus = SystemParams::make(2, 1, mu);
    const auto minus = SystemParams::make(2, -1, mu);
    const PhaseState s{{r(rng), r(rng)}, {r(rng), r(rng)}};
    ComplexPhaseState z{{-i * s.u[0], -i * s.u[1]}, {i * s.v[0], i * s.v[1]}};
    const auto lhs = eval_observable(Observable::deformation(5.0, DeformationForm::SignCorrected), plus, z);
    const double rhs = eval_observable(Observable::deformation(5.0, DeformationForm::AsPrinted), minus, s);
    CHECK(std::abs(lhs - std::complex<double>(rhs)) <= 1e-12 * (1 + std::abs(rhs)));
  }
}
