#include "critsys/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

// Fourth-order triple-jump composition weights.
const double kCbrt2 = std::cbrt(2.0);
const double kYoshidaOuter = 1.0 / (2.0 - kCbrt2);
const double kYoshidaInner = -kCbrt2 / (2.0 - kCbrt2);

void kick(const SystemParams& params, PhaseState& x, double h) {
  double radius = 0.0;
  for (double ui : x.u) radius += ui * ui;
  double coupling = params.epsilon;
  for (int p = 1; p < params.k; ++p) coupling *= radius;
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    x.v[i] += h * (coupling - params.mu[i]) * x.u[i];
  }
}

void drift(PhaseState& x, double h) {
  for (std::size_t i = 0; i < x.u.size(); ++i) x.u[i] += h * x.v[i];
}

void verlet(const SystemParams& params, PhaseState& x, double h) {
  kick(params, x, 0.5 * h);
  drift(x, h);
  kick(params, x, 0.5 * h);
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "verlet" || name == "StormerVerlet2") return Scheme::StormerVerlet2;
  if (name == "yoshida4" || name == "Yoshida4") return Scheme::Yoshida4;
  throw ValidationError("unknown integration scheme '" + name + "' (expected verlet or yoshida4)");
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::StormerVerlet2 ? "verlet" : "yoshida4";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw ContractViolation("t_end must be >= dt");
  if (record_stride < 1) throw ContractViolation("record_stride must be >= 1");
}

long long IntegratorConfig::steps() const { return std::llround(t_end / dt); }

void symplectic_step(const SystemParams& params, PhaseState& x, double dt, Scheme scheme) {
  if (scheme == Scheme::StormerVerlet2) {
    verlet(params, x, dt);
    return;
  }
  verlet(params, x, kYoshidaOuter * dt);
  verlet(params, x, kYoshidaInner * dt);
  verlet(params, x, kYoshidaOuter * dt);
}

void check_escape(const PhaseState& x, double t) {
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    const double a = std::abs(x.u[i]);
    const double b = std::abs(x.v[i]);
    if (!std::isfinite(a) || !std::isfinite(b) || a > kEscapeThreshold || b > kEscapeThreshold) {
      throw EscapeError(fmt::format("trajectory escaped after t = {:.17g}", t), t);
    }
  }
}

Trajectory integrate(const SystemParams& params, const PhaseState& start, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  try {
    check_state(params, start);
  } catch (const ContractViolation& e) {
    throw ContractViolation(std::string("integrate: ") + e.what());
  }

  Trajectory traj;
  traj.params = params;
  const long long n = cfg.steps();
  const auto expected = static_cast<std::size_t>(n / cfg.record_stride + 2);
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.energies.reserve(expected);

  auto record = [&](double t, const PhaseState& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.energies.push_back(hamiltonian_value(params, x));
  };

  PhaseState x = start;
  record(0.0, x);
  double last_t = 0.0;
  for (long long step = 1; step <= n; ++step) {
    symplectic_step(params, x, cfg.dt, cfg.scheme);
    const double t = static_cast<double>(step) * cfg.dt;
    check_escape(x, last_t);
    last_t = t;
    if (step % cfg.record_stride == 0 || step == n) record(t, x);
  }
  return traj;
}

double energy_drift(const Trajectory& traj) {
  if (traj.energies.empty()) throw EmptyInput("energy_drift of an empty trajectory");
  double worst = 0.0;
  for (double e : traj.energies) worst = std::max(worst, std::abs(e - traj.energies.front()));
  return worst;
}

double reverse_check(const SystemParams& params, const PhaseState& start, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  check_state(params, start);
  const long long n = cfg.steps();
  PhaseState x = start;
  for (long long s = 0; s < n; ++s) {
    symplectic_step(params, x, cfg.dt, cfg.scheme);
    check_escape(x, static_cast<double>(s) * cfg.dt);
  }
  for (double& vi : x.v) vi = -vi;
  for (long long s = 0; s < n; ++s) {
    symplectic_step(params, x, cfg.dt, cfg.scheme);
    check_escape(x, static_cast<double>(n + s) * cfg.dt);
  }
  for (double& vi : x.v) vi = -vi;
  double dist = 0.0;
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    dist = std::max({dist, std::abs(x.u[i] - start.u[i]), std::abs(x.v[i] - start.v[i])});
  }
  return dist;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int m = traj.params.m;
  out << 't';
  for (int i = 1; i <= m; ++i) out << ",u" << i;
  for (int i = 1; i <= m; ++i) out << ",v" << i;
  out << ",H\n";
  for (std::size_t r = 0; r < traj.size(); ++r) {
    out << fmt::format("{:.17g}", traj.times[r]);
    for (double x : traj.states[r].u) out << fmt::format(",{:.17g}", x);
    for (double x : traj.states[r].v) out << fmt::format(",{:.17g}", x);
    out << fmt::format(",{:.17g}\n", traj.energies[r]);
  }
}

}  // namespace critsys
