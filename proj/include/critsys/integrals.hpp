#pragma once

// Numerical audit of the explicit first integrals: drift along a symplectic
// trajectory and the Poisson bracket with H at random phase-space points.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critsys/dynamics.hpp"
#include "critsys/integrator.hpp"

namespace critsys {

struct IntegralCheckConfig {
  IntegratorConfig integrator{1e-3, 100.0, Scheme::StormerVerlet2, 10};
  int bracket_states = 100;
  std::uint64_t seed = 0;
  double state_radius = 1.0;  // bracket states uniform in [-radius, radius]^(2m)
  double drift_tol = 1e-6;
  double bracket_tol = 1e-10;

  void validate() const;
};

struct IntegralCheck {
  std::string name;
  double drift = 0.0;        // max |I(t) - I(0)| over recorded states
  double max_bracket = 0.0;  // max |{H, I}| over the random states
  bool conserved = false;
};

/// Both signs of the quartic-coupling integral at one spectral value (k = 2).
struct DeformationDiscrepancy {
  double s = 0.0;
  IntegralCheck printed;
  IntegralCheck corrected;
};

struct IntegralReport {
  SystemParams params;
  IntegralCheckConfig config;
  std::vector<IntegralCheck> checks;  // applicable_integrals(params), in order
  std::optional<DeformationDiscrepancy> deformation;

  bool all_conserved() const;
  std::string to_text() const;
};

IntegralCheck check_observable(const Observable& obs, const SystemParams& params, const Trajectory& traj,
                               const std::vector<PhaseState>& states, const IntegralCheckConfig& cfg);

/// Integrates from start and audits every applicable integral; for k = 2 the
/// printed and sign-corrected deformation forms are compared side by side.
IntegralReport check_integrals(const SystemParams& params, const PhaseState& start,
                               const IntegralCheckConfig& cfg = {});

}  // namespace critsys
