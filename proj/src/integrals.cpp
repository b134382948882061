#include "critsys/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

std::vector<PhaseState> random_states(const SystemParams& params, const IntegralCheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> x(-cfg.state_radius, cfg.state_radius);
  std::vector<PhaseState> out(static_cast<std::size_t>(cfg.bracket_states));
  for (auto& s : out) {
    for (int i = 0; i < params.m; ++i) s.u.push_back(x(rng));
    for (int i = 0; i < params.m; ++i) s.v.push_back(x(rng));
  }
  return out;
}

std::string line(const IntegralCheck& c) {
  return fmt::format("{}: drift {:.17g} bracket {:.17g} {}\n", c.name, c.drift, c.max_bracket,
                     c.conserved ? "conserved" : "NOT conserved");
}

}  // namespace

void IntegralCheckConfig::validate() const {
  integrator.validate();
  if (bracket_states < 1) throw ContractViolation("bracket_states must be >= 1");
  if (!(state_radius > 0.0) || !std::isfinite(state_radius)) throw ContractViolation("state_radius must be positive");
  if (!(drift_tol > 0.0) || !(bracket_tol > 0.0)) throw ContractViolation("tolerances must be positive");
}

IntegralCheck check_observable(const Observable& obs, const SystemParams& params, const Trajectory& traj,
                               const std::vector<PhaseState>& states, const IntegralCheckConfig& cfg) {
  if (traj.states.empty()) throw EmptyInput("trajectory has no states");
  IntegralCheck c;
  c.name = obs.name();
  const double ref = eval_observable(obs, params, traj.states.front());
  for (const auto& s : traj.states) c.drift = std::max(c.drift, std::abs(eval_observable(obs, params, s) - ref));
  for (const auto& s : states) {
    c.max_bracket = std::max(c.max_bracket, std::abs(poisson_bracket(Observable::hamiltonian(), obs, params, s)));
  }
  c.conserved = c.drift <= cfg.drift_tol && c.max_bracket <= cfg.bracket_tol;
  return c;
}

IntegralReport check_integrals(const SystemParams& params, const PhaseState& start, const IntegralCheckConfig& cfg) {
  params.validate();
  cfg.validate();
  check_state(params, start);

  IntegralReport rep;
  rep.params = params;
  rep.config = cfg;
  const auto traj = integrate(params, start, cfg.integrator);
  const auto states = random_states(params, cfg);
  for (const auto& o : applicable_integrals(params)) rep.checks.push_back(check_observable(o, params, traj, states, cfg));

  if (params.k == 2) {
    DeformationDiscrepancy d;
    d.s = generic_spectral_values(params).front();
    d.printed = check_observable(Observable::deformation(d.s, DeformationForm::AsPrinted), params, traj, states, cfg);
    d.corrected =
        check_observable(Observable::deformation(d.s, DeformationForm::SignCorrected), params, traj, states, cfg);
    rep.deformation = d;
  }
  return rep;
}

bool IntegralReport::all_conserved() const {
  return std::all_of(checks.begin(), checks.end(), [](const IntegralCheck& c) { return c.conserved; });
}

std::string IntegralReport::to_text() const {
  std::string out = fmt::format("m: {}\nk: {}\nepsilon: {}\nmu:", params.m, params.k, params.epsilon);
  for (double x : params.mu) out += fmt::format(" {:.17g}", x);
  out += fmt::format("\nt_end: {:.17g}\ndt: {:.17g}\nscheme: {}\nbracket_states: {}\n", config.integrator.t_end,
                     config.integrator.dt, to_string(config.integrator.scheme), config.bracket_states);
  out += fmt::format("drift_tol: {:.17g}\nbracket_tol: {:.17g}\n", config.drift_tol, config.bracket_tol);
  for (const auto& c : checks) out += line(c);
  if (deformation) {
    out += fmt::format("deformation_discrepancy:\n  s: {:.17g}\n  as_printed: ", deformation->s);
    out += line(deformation->printed);
    out += "  sign_corrected: " + line(deformation->corrected);
    const bool flip = !deformation->printed.conserved && deformation->corrected.conserved;
    out += fmt::format("  conserved_form: {}\n",
                       deformation->printed.conserved ? "as-printed" : (flip ? "sign-corrected" : "neither"));
  }
  out += fmt::format("all_conserved: {}\n", all_conserved() ? "yes" : "no");
  return out;
}

}  // namespace critsys
