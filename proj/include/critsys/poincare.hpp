#pragma once

// Poincare sections u1 = 0 on the energy level H = h of m = 2 systems,
// Benettin estimates of the largest Lyapunov exponent, CSV/SVG output.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "critsys/dynamics.hpp"
#include "critsys/integrator.hpp"

namespace critsys {

enum class CrossingDirection { Increasing, Decreasing, Both };

CrossingDirection parse_direction(const std::string& text);

struct SectionSeed {
  double u2 = 0.0;
  double v2 = 0.0;
};

struct SectionConfig {
  double h = 0.0;
  std::vector<SectionSeed> grid;
  int crossings_per_seed = 100;
  CrossingDirection direction = CrossingDirection::Increasing;
  double dt = 1e-3;
  Scheme scheme = Scheme::Yoshida4;
  /// A seed stops once its integration time reaches t_max, even if it has
  /// fewer crossings than requested (e.g. the origin equilibrium).
  double t_max = 1e5;
  /// Seeds are independent; output order never depends on this.
  int threads = 1;

  void validate() const;
};

struct SectionPoint {
  int seed_id = 0;
  int crossing_index = 0;
  double u2 = 0.0;
  double v2 = 0.0;
  double t = 0.0;
  /// Full phase state at the refined crossing; u[0] is within 1e-9 of zero.
  PhaseState state;
};

struct SeedReport {
  int seed_id = 0;
  bool lifted = false;
  bool escaped = false;
  bool time_limit_reached = false;
  int crossings = 0;
  double last_time = 0.0;
};

struct SectionPointSet {
  SystemParams params;
  double h = 0.0;
  std::vector<SectionPoint> points;
  std::vector<SeedReport> seeds;
};

/// State on H = h with u1 = 0, v1 >= 0 over the section coordinates
/// (u2, v2); nullopt when the radicand is negative. Requires m = 2.
std::optional<PhaseState> lift_to_energy_level(const SystemParams& params, double h, double u2, double v2);

/// count seeds (u2_j, 0) evenly spaced strictly inside the admissible
/// interval of the u2 axis at level h.
std::vector<SectionSeed> default_seed_grid(const SystemParams& params, double h, int count);

SectionPointSet compute_section(const SystemParams& params, const SectionConfig& cfg);

struct MleConfig {
  double renorm_interval = 1.0;
  double offset = 1e-8;
  Scheme scheme = Scheme::Yoshida4;
};

/// Benettin two-trajectory estimate of the largest Lyapunov exponent.
double estimate_mle(const SystemParams& params, const PhaseState& start, double t_end, double dt,
                    const MleConfig& cfg = {});

/// Writes the header seed,idx,u2,v2,t and one row per point.
void write_section_csv(const SectionPointSet& set, std::ostream& out);

/// 800x800 scatter with v2 on the horizontal axis and u2 on the vertical one.
void write_section_svg(const SectionPointSet& set, std::ostream& out);

/// Writes CSV when path ends in .csv, SVG when it ends in .svg, and both
/// (path + ".csv", path + ".svg") otherwise.
void render(const SectionPointSet& set, const std::filesystem::path& path);

}  // namespace critsys
