#include "critsys/poincare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

void require_two_dof(const SystemParams& params) {
  params.validate();
  if (params.m != 2) throw UnsupportedObservable(fmt::format("Poincare sections need m = 2 (got m = {})", params.m));
}

double lift_radicand(const SystemParams& params, double h, double u2, double v2) {
  return 2.0 * h - v2 * v2 - params.mu[1] * u2 * u2 +
         (static_cast<double>(params.epsilon) / params.k) * std::pow(u2 * u2, params.k);
}

bool crossed(double before, double after, CrossingDirection dir) {
  const bool up = before < 0.0 && after >= 0.0;
  const bool down = before > 0.0 && after <= 0.0;
  switch (dir) {
    case CrossingDirection::Increasing:
      return up;
    case CrossingDirection::Decreasing:
      return down;
    case CrossingDirection::Both:
      return up || down;
  }
  return false;
}

/// Bisection on the sub-step length tau in [0, dt] until |u1| <= 1e-9.
PhaseState refine_crossing(const SystemParams& params, const PhaseState& before, double dt, Scheme scheme,
                           double& tau_out) {
  double lo = 0.0;
  double hi = dt;
  const bool rising = before.u[0] < 0.0;
  PhaseState probe = before;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    probe = before;
    symplectic_step(params, probe, mid, scheme);
    const double u1 = probe.u[0];
    if (it >= 12 && std::abs(u1) <= 1e-9) {
      tau_out = mid;
      return probe;
    }
    if ((u1 < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  tau_out = 0.5 * (lo + hi);
  probe = before;
  symplectic_step(params, probe, tau_out, scheme);
  return probe;
}

struct SeedResult {
  SeedReport report;
  std::vector<SectionPoint> points;
};

SeedResult run_seed(const SystemParams& params, const SectionConfig& cfg, int seed_id) {
  SeedResult out;
  out.report.seed_id = seed_id;
  const auto& seed = cfg.grid[static_cast<std::size_t>(seed_id)];
  auto lifted = lift_to_energy_level(params, cfg.h, seed.u2, seed.v2);
  if (!lifted) return out;
  out.report.lifted = true;

  PhaseState x = *lifted;
  long long step = 0;
  const auto max_steps = static_cast<long long>(std::ceil(cfg.t_max / cfg.dt));
  while (out.report.crossings < cfg.crossings_per_seed) {
    if (step >= max_steps) {
      out.report.time_limit_reached = true;
      break;
    }
    const PhaseState before = x;
    symplectic_step(params, x, cfg.dt, cfg.scheme);
    const double t_before = static_cast<double>(step) * cfg.dt;
    ++step;
    try {
      check_escape(x, t_before);
    } catch (const EscapeError& e) {
      out.report.escaped = true;
      out.report.last_time = e.last_finite_time();
      return out;
    }
    if (crossed(before.u[0], x.u[0], cfg.direction)) {
      double tau = 0.0;
      PhaseState at = refine_crossing(params, before, cfg.dt, cfg.scheme, tau);
      SectionPoint p;
      p.seed_id = seed_id;
      p.crossing_index = out.report.crossings++;
      p.u2 = at.u[1];
      p.v2 = at.v[1];
      p.t = t_before + tau;
      p.state = std::move(at);
      out.points.push_back(std::move(p));
    }
  }
  out.report.last_time = static_cast<double>(step) * cfg.dt;
  return out;
}

}  // namespace

CrossingDirection parse_direction(const std::string& text) {
  if (text == "+" || text == "increasing") return CrossingDirection::Increasing;
  if (text == "-" || text == "decreasing") return CrossingDirection::Decreasing;
  if (text == "both" || text == "+-") return CrossingDirection::Both;
  throw ValidationError("unknown crossing direction '" + text + "' (expected +, - or both)");
}

void SectionConfig::validate() const {
  if (crossings_per_seed < 1) throw ContractViolation("crossings_per_seed must be >= 1");
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  if (!(t_max >= dt)) throw ContractViolation("t_max must be >= dt");
  if (!std::isfinite(h)) throw ContractViolation("energy level must be finite");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
}

std::optional<PhaseState> lift_to_energy_level(const SystemParams& params, double h, double u2, double v2) {
  require_two_dof(params);
  const double radicand = lift_radicand(params, h, u2, v2);
  if (!(radicand >= 0.0)) return std::nullopt;
  return PhaseState{{0.0, u2}, {std::sqrt(radicand), v2}};
}

std::vector<SectionSeed> default_seed_grid(const SystemParams& params, double h, int count) {
  require_two_dof(params);
  if (count < 1) throw ContractViolation("seed count must be >= 1");
  auto admissible = [&](double u) { return lift_radicand(params, h, u, 0.0) >= 0.0; };

  // Locate the first admissible stretch of the nonnegative u2 axis.
  double step = 1e-3;
  double lo = 0.0;
  while (!admissible(lo)) {
    lo += step;
    if (lo > 1e3) throw EmptyInput(fmt::format("no admissible seed on the u2 axis at h = {}", h));
  }
  if (lo > 0.0) {
    double a = lo - step, b = lo;
    for (int i = 0; i < 100; ++i) (admissible(0.5 * (a + b)) ? b : a) = 0.5 * (a + b);
    lo = b;
  }
  double hi = lo;
  while (admissible(hi + step)) {
    hi += step;
    if (hi > 1e3) break;
  }
  double a = hi, b = hi + step;
  for (int i = 0; i < 100; ++i) (admissible(0.5 * (a + b)) ? a : b) = 0.5 * (a + b);
  hi = a;

  std::vector<SectionSeed> seeds;
  for (int j = 0; j < count; ++j) {
    seeds.push_back({lo + (hi - lo) * (j + 1) / (count + 1), 0.0});
  }
  return seeds;
}

SectionPointSet compute_section(const SystemParams& params, const SectionConfig& cfg) {
  require_two_dof(params);
  cfg.validate();
  if (cfg.grid.empty()) throw EmptyInput("section needs at least one seed");
  bool any = false;
  for (const auto& s : cfg.grid) any = any || lift_to_energy_level(params, cfg.h, s.u2, s.v2).has_value();
  if (!any) throw EmptyInput(fmt::format("no seed lifts to the energy level h = {}", cfg.h));

  const int n = static_cast<int>(cfg.grid.size());
  std::vector<SeedResult> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int id = next++; id < n; id = next++) results[static_cast<std::size_t>(id)] = run_seed(params, cfg, id);
  };
  const int nthreads = std::min(cfg.threads, n);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SectionPointSet set;
  set.params = params;
  set.h = cfg.h;
  for (auto& r : results) {
    set.seeds.push_back(r.report);
    for (auto& p : r.points) set.points.push_back(std::move(p));
  }
  return set;
}

double estimate_mle(const SystemParams& params, const PhaseState& start, double t_end, double dt,
                    const MleConfig& cfg) {
  params.validate();
  check_state(params, start);
  if (!(dt > 0.0) || !(t_end >= cfg.renorm_interval) || !(cfg.renorm_interval >= dt) || !(cfg.offset > 0.0)) {
    throw ContractViolation("estimate_mle needs dt > 0, t_end >= renorm interval >= dt, offset > 0");
  }
  const auto per_block = std::max<long long>(1, std::llround(cfg.renorm_interval / dt));
  const auto blocks = static_cast<long long>(std::floor(t_end / (static_cast<double>(per_block) * dt)));
  const std::size_t m = start.u.size();
  const double unit = 1.0 / std::sqrt(2.0 * static_cast<double>(m));

  PhaseState x = start;
  PhaseState y = start;
  for (std::size_t i = 0; i < m; ++i) {
    y.u[i] += cfg.offset * unit;
    y.v[i] += cfg.offset * unit;
  }
  double log_sum = 0.0;
  long long step = 0;
  for (long long b = 0; b < blocks; ++b) {
    for (long long s = 0; s < per_block; ++s) {
      symplectic_step(params, x, dt, cfg.scheme);
      symplectic_step(params, y, dt, cfg.scheme);
      ++step;
    }
    check_escape(x, static_cast<double>(step) * dt);
    check_escape(y, static_cast<double>(step) * dt);
    double d2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      d2 += (y.u[i] - x.u[i]) * (y.u[i] - x.u[i]) + (y.v[i] - x.v[i]) * (y.v[i] - x.v[i]);
    }
    const double d = std::sqrt(d2);
    if (!(d > 0.0)) continue;
    log_sum += std::log(d / cfg.offset);
    const double scale = cfg.offset / d;
    for (std::size_t i = 0; i < m; ++i) {
      y.u[i] = x.u[i] + (y.u[i] - x.u[i]) * scale;
      y.v[i] = x.v[i] + (y.v[i] - x.v[i]) * scale;
    }
  }
  return log_sum / (static_cast<double>(step) * dt);
}

void write_section_csv(const SectionPointSet& set, std::ostream& out) {
  out << "seed,idx,u2,v2,t\n";
  for (const auto& p : set.points) {
    out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", p.seed_id, p.crossing_index, p.u2, p.v2, p.t);
  }
}

void write_section_svg(const SectionPointSet& set, std::ostream& out) {
  if (set.points.empty()) throw EmptyInput("nothing to render: section has no points");
  double umin = set.points.front().u2, umax = umin;
  double vmin = set.points.front().v2, vmax = vmin;
  for (const auto& p : set.points) {
    umin = std::min(umin, p.u2);
    umax = std::max(umax, p.u2);
    vmin = std::min(vmin, p.v2);
    vmax = std::max(vmax, p.v2);
  }
  const double pad_u = std::max(1e-9, 0.05 * (umax - umin));
  const double pad_v = std::max(1e-9, 0.05 * (vmax - vmin));
  umin -= pad_u;
  umax += pad_u;
  vmin -= pad_v;
  vmax += pad_v;

  constexpr double size = 800.0;
  constexpr double margin = 60.0;
  const double plot = size - 2 * margin;
  auto px = [&](double v2) { return margin + (v2 - vmin) / (vmax - vmin) * plot; };
  auto py = [&](double u2) { return size - margin - (u2 - umin) / (umax - umin) * plot; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", margin,
                     margin, plot, plot);
  out << fmt::format("<text x=\"400\" y=\"{}\" text-anchor=\"middle\" font-size=\"20\">v2</text>\n", size - 15);
  out << fmt::format(
      "<text x=\"20\" y=\"400\" text-anchor=\"middle\" font-size=\"20\" transform=\"rotate(-90 20 400)\">u2</text>\n");
  out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">{:.4g}</text>\n", margin, size - margin + 18, vmin);
  out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4g}</text>\n", size - margin,
                     size - margin + 18, vmax);
  out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4g}</text>\n", margin - 4,
                     size - margin, umin);
  out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4g}</text>\n", margin - 4,
                     margin + 10, umax);
  for (const auto& p : set.points) {
    // Golden-angle hue spacing keeps neighbouring seeds distinguishable.
    const double hue = std::fmod(p.seed_id * 137.508, 360.0);
    out << fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"1.2\" fill=\"hsl({:.1f},70%,40%)\"/>\n", px(p.v2),
                       py(p.u2), hue);
  }
  out << "</svg>\n";
}

void render(const SectionPointSet& set, const std::filesystem::path& path) {
  if (set.points.empty()) throw EmptyInput("nothing to render: section has no points");
  auto write = [&](const std::filesystem::path& target, bool csv) {
    std::ofstream file(target);
    if (!file) throw IoError("cannot open " + target.string() + " for writing");
    csv ? write_section_csv(set, file) : write_section_svg(set, file);
    if (!file) throw IoError("failed writing " + target.string());
  };
  const auto ext = path.extension().string();
  if (ext == ".csv") {
    write(path, true);
  } else if (ext == ".svg") {
    write(path, false);
  } else {
    write(path.string() + ".csv", true);
    write(path.string() + ".svg", false);
  }
}

}  // namespace critsys
