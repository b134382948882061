#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "critsys/dynamics.hpp"

namespace critsys {

enum class Scheme { StormerVerlet2, Yoshida4 };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::StormerVerlet2;
  int record_stride = 1;

  void validate() const;
  /// round(t_end / dt)
  long long steps() const;
};

struct Trajectory {
  SystemParams params;
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> energies;

  std::size_t size() const noexcept { return times.size(); }
};

/// Components above this magnitude count as an escape to infinity.
inline constexpr double kEscapeThreshold = 1e12;

/// Advances x in place by one step of size dt of the chosen splitting of
/// H = T(v) + V(u). No escape checks.
void symplectic_step(const SystemParams& params, PhaseState& x, double dt, Scheme scheme);

/// Throws EscapeError when some component of x is non-finite or exceeds
/// kEscapeThreshold; t is reported as the last finite time.
void check_escape(const PhaseState& x, double t);

/// Fixed-step integration; samples at t = 0 and every record_stride steps
/// (the final step is always recorded).
Trajectory integrate(const SystemParams& params, const PhaseState& start, const IntegratorConfig& cfg);

/// max_i |H_i - H_0|.
double energy_drift(const Trajectory& traj);

/// Integrates forward cfg.steps(), flips v, integrates back the same number
/// of steps, flips v again and returns the max-norm distance to start.
double reverse_check(const SystemParams& params, const PhaseState& start, const IntegratorConfig& cfg);

/// CSV with header t,u1..um,v1..vm,H and 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace critsys
