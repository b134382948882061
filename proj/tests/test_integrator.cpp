#include <doctest.h>

#include <cmath>
#include <sstream>

#include "critsys/errors.hpp"
#include "critsys/integrator.hpp"

using namespace critsys;

namespace {

IntegratorConfig config(double dt, double t_end, Scheme scheme = Scheme::StormerVerlet2, int stride = 1) {
  IntegratorConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.scheme = scheme;
  c.record_stride = stride;
  return c;
}

}  // namespace

TEST_CASE("single oscillator drift") {
  const auto p = SystemParams::make(2, -1, {1});
  const auto traj = integrate(p, PhaseState{{0.1}, {0}}, config(1e-3, 100, Scheme::StormerVerlet2, 10));
  CHECK(energy_drift(traj) <= 1e-8);
  for (const auto& s : traj.states) CHECK(std::abs(s.u[0]) < 0.2);
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  CHECK(traj.times.back() == doctest::Approx(100.0));
}

TEST_CASE("origin is an equilibrium") {
  const auto p = SystemParams::make(3, 1, {0.1, 1});
  const auto traj = integrate(p, PhaseState{{0, 0}, {0, 0}}, config(1e-2, 1));
  for (const auto& s : traj.states) {
    CHECK(s.u == std::vector<double>{0, 0});
    CHECK(s.v == std::vector<double>{0, 0});
  }
  CHECK(energy_drift(traj) == 0.0);
  CHECK(reverse_check(p, PhaseState{{0, 0}, {0, 0}}, config(1e-2, 1)) == 0.0);
}

TEST_CASE("two-degree section setup stays bounded with small drift") {
  const auto p = SystemParams::make(3, -1, {0.1, 1});
  // u1 = 0, u2 = 0.2, v2 = 0 lifted to h = 0.85
  const double v1 = std::sqrt(2 * 0.85 - 1.0 * 0.04 - std::pow(0.04, 3) / 3);
  const PhaseState start{{0, 0.2}, {v1, 0}};
  CHECK(hamiltonian_value(p, start) == doctest::Approx(0.85).epsilon(1e-14));
  const auto t100 = integrate(p, start, config(1e-3, 100, Scheme::StormerVerlet2, 100));
  const auto t1000 = integrate(p, start, config(1e-3, 1000, Scheme::StormerVerlet2, 100));
  CHECK(energy_drift(t1000) <= 1e-6);
  CHECK(energy_drift(t1000) <= 10 * energy_drift(t100));
  const auto y4 = integrate(p, start, config(1e-3, 100, Scheme::Yoshida4, 100));
  CHECK(energy_drift(y4) <= 1e-10);
}

TEST_CASE("drift reports an injected perturbation") {
  const auto p = SystemParams::make(2, -1, {1});
  auto traj = integrate(p, PhaseState{{0}, {0}}, config(1e-2, 1));
  traj.states.back().v[0] = 0.1;
  traj.energies.back() = hamiltonian_value(p, traj.states.back());
  CHECK(energy_drift(traj) == doctest::Approx(0.005));
  CHECK_THROWS_AS(energy_drift(Trajectory{}), EmptyInput);
}

TEST_CASE("time reversal") {
  const auto p = SystemParams::make(2, -1, {1});
  CHECK(reverse_check(p, PhaseState{{0.1}, {0}}, config(1e-3, 10)) <= 1e-9);
  CHECK(reverse_check(p, PhaseState{{0.1}, {0}}, config(1e-2, 100)) <= 1e-7);
  CHECK(reverse_check(p, PhaseState{{0.1}, {0}}, config(1e-2, 100, Scheme::Yoshida4)) <= 1e-7);
}

TEST_CASE("one step preserves phase-space area") {
  const auto p = SystemParams::make(3, 1, {0.7});
  const double h = 1e-6;
  for (Scheme sc : {Scheme::StormerVerlet2, Scheme::Yoshida4}) {
    auto step = [&](double u, double v) {
      PhaseState x{{u}, {v}};
      symplectic_step(p, x, 0.05, sc);
      return x;
    };
    const double u0 = 0.4, v0 = -0.3;
    const auto du_p = step(u0 + h, v0), du_m = step(u0 - h, v0);
    const auto dv_p = step(u0, v0 + h), dv_m = step(u0, v0 - h);
    const double a = (du_p.u[0] - du_m.u[0]) / (2 * h), b = (dv_p.u[0] - dv_m.u[0]) / (2 * h);
    const double c = (du_p.v[0] - du_m.v[0]) / (2 * h), d = (dv_p.v[0] - dv_m.v[0]) / (2 * h);
    CHECK(std::abs(a * d - b * c - 1) <= 1e-8);
  }
}

TEST_CASE("first integrals of the integrable configurations are conserved") {
  const std::vector<SystemParams> cases = {
      SystemParams::make(2, -1, {0.1, 1.0}), SystemParams::make(2, -1, {0.1, -1.0}),
      SystemParams::make(2, 1, {0.6, 1.0, 1.5}), SystemParams::make(3, -1, {1, 1}),
      SystemParams::make(4, 1, {2, 2, 2}),
  };
  for (const auto& p : cases) {
    PhaseState start;
    for (int i = 0; i < p.m; ++i) {
      start.u.push_back(0.1 * (i + 1));
      start.v.push_back(0.05 * (p.m - i));
    }
    const auto traj = integrate(p, start, config(1e-3, 100, Scheme::StormerVerlet2, 50));
    for (const auto& o : applicable_integrals(p)) {
      const double ref = eval_observable(o, p, traj.states.front());
      double drift = 0;
      for (const auto& s : traj.states) drift = std::max(drift, std::abs(eval_observable(o, p, s) - ref));
      INFO(o.name(), " k=", p.k, " m=", p.m);
      CHECK(drift <= 1e-6);
    }
  }
}

TEST_CASE("complexified integral is conserved along the confining flow") {
  // epsilon = -1 trajectory; the epsilon = +1 integral evaluated at (-i u, i v).
  const std::vector<double> mu = {0.1, 1.0};
  const auto minus = SystemParams::make(2, -1, mu);
  const auto plus = SystemParams::make(2, 1, mu);
  const auto traj = integrate(minus, PhaseState{{0.3, -0.5}, {0.4, 0.2}}, config(1e-3, 100, Scheme::StormerVerlet2, 50));
  const auto obs = Observable::deformation(2.5, DeformationForm::SignCorrected);
  const std::complex<double> i(0, 1);
  auto lift = [&](const PhaseState& s) {
    return ComplexPhaseState{{-i * s.u[0], -i * s.u[1]}, {i * s.v[0], i * s.v[1]}};
  };
  const auto ref = eval_observable(obs, plus, lift(traj.states.front()));
  for (const auto& s : traj.states) CHECK(std::abs(eval_observable(obs, plus, lift(s)) - ref) <= 1e-6);
}

TEST_CASE("escape is reported with the last finite time") {
  const auto p = SystemParams::make(2, 1, {0.1});
  try {
    integrate(p, PhaseState{{2.0}, {0.0}}, config(1e-3, 100));
    FAIL("expected escape");
  } catch (const EscapeError& e) {
    CHECK(e.last_finite_time() > 0);
    CHECK(e.last_finite_time() < 100);
  }
}

TEST_CASE("config validation and CSV format") {
  CHECK_THROWS_AS(config(0, 1).validate(), ContractViolation);
  CHECK_THROWS_AS(config(1, 0.5).validate(), ContractViolation);
  CHECK_THROWS_AS(config(0.1, 1, Scheme::StormerVerlet2, 0).validate(), ContractViolation);
  CHECK(parse_scheme("yoshida4") == Scheme::Yoshida4);
  CHECK_THROWS_AS(parse_scheme("rk4"), ValidationError);
  CHECK_THROWS_AS(integrate(SystemParams::make(2, 1, {1}), PhaseState{{NAN}, {0}}, config(0.1, 1)), ContractViolation);

  const auto p = SystemParams::make(2, -1, {1, 2});
  const auto traj = integrate(p, PhaseState{{0.1, 0}, {0, 0.1}}, config(0.25, 1));
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,u1,u2,v1,v2,H");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  // bit-identical reruns
  std::ostringstream again;
  write_trajectory_csv(integrate(p, PhaseState{{0.1, 0}, {0, 0.1}}, config(0.25, 1)), again);
  CHECK(again.str() == os.str());
}
