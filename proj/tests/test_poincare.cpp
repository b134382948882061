#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "critsys/errors.hpp"
#include "critsys/poincare.hpp"

using namespace critsys;

namespace {

SectionConfig section_config(const SystemParams& p, double h, int seeds, int crossings, double dt = 1e-2) {
  SectionConfig c;
  c.h = h;
  c.grid = default_seed_grid(p, h, seeds);
  c.crossings_per_seed = crossings;
  c.dt = dt;
  return c;
}

// Largest per-seed standard deviation of obs, relative to its mean magnitude.
double worst_relative_spread(const SectionPointSet& set, const Observable& obs) {
  std::map<int, std::vector<double>> by_seed;
  for (const auto& pt : set.points) by_seed[pt.seed_id].push_back(eval_observable(obs, set.params, pt.state));
  double worst = 0;
  for (const auto& [id, xs] : by_seed) {
    double mean = 0, abs_mean = 0;
    for (double x : xs) {
      mean += x;
      abs_mean += std::abs(x);
    }
    mean /= static_cast<double>(xs.size());
    abs_mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(xs.size()));
    worst = std::max(worst, abs_mean > 0 ? sd / abs_mean : sd);
  }
  return worst;
}

}  // namespace

TEST_CASE("lift onto the energy level") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  auto s = lift_to_energy_level(p, 0.85, 0, 0);
  REQUIRE(s.has_value());
  CHECK(s->v[0] == doctest::Approx(std::sqrt(1.7)));
  CHECK(s->u[0] == 0.0);
  s = lift_to_energy_level(p, 0.85, 0, std::sqrt(1.7));
  REQUIRE(s.has_value());
  CHECK(s->v[0] == doctest::Approx(0.0));
  CHECK_FALSE(lift_to_energy_level(p, 0.85, 0, 1.5).has_value());
  CHECK_THROWS_AS(lift_to_energy_level(SystemParams::make(2, -1, {1, 1, 1}), 0.85, 0, 0), UnsupportedObservable);
}

TEST_CASE("integrable section lies on level curves of the second integral") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  const auto set = compute_section(p, section_config(p, 0.85, 12, 400));
  CHECK(set.points.size() == 12u * 400u);
  for (const auto& pt : set.points) {
    CHECK(std::abs(pt.state.u[0]) <= 1e-9);
    CHECK(std::abs(hamiltonian_value(p, pt.state) - 0.85) <= 1e-6);
  }
  CHECK(worst_relative_spread(set, conserved_deformation(p, 2.0)) <= 1e-5);
}

TEST_CASE("equal frequencies conserve the angular integral on the section") {
  const auto p = SystemParams::make(3, -1, {1, 1});
  const auto set = compute_section(p, section_config(p, 0.85, 6, 100));
  REQUIRE_FALSE(set.points.empty());
  std::map<int, std::pair<double, double>> range;
  for (const auto& pt : set.points) {
    const double a = eval_observable(Observable::angular(1), p, pt.state);
    auto [it, fresh] = range.try_emplace(pt.seed_id, a, a);
    it->second.first = std::min(it->second.first, a);
    it->second.second = std::max(it->second.second, a);
  }
  for (const auto& [id, r] : range) CHECK(r.second - r.first <= 1e-6);
}

TEST_CASE("equilibrium seed produces no crossings") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  SectionConfig c;
  c.h = 0;
  c.grid = {{0, 0}};
  c.crossings_per_seed = 5;
  c.dt = 1e-2;
  c.t_max = 50;
  const auto set = compute_section(p, c);
  CHECK(set.points.empty());
  REQUIRE(set.seeds.size() == 1);
  CHECK(set.seeds[0].time_limit_reached);
}

TEST_CASE("no admissible seed is an error") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  SectionConfig c;
  c.h = 0.85;
  c.grid = {{0, 3}};
  CHECK_THROWS_AS(compute_section(p, c), EmptyInput);
}

TEST_CASE("output is deterministic and independent of thread count") {
  const auto p = SystemParams::make(3, -1, {0.1, 1});
  auto c = section_config(p, 0.85, 4, 30);
  std::ostringstream a, b, d;
  write_section_csv(compute_section(p, c), a);
  write_section_csv(compute_section(p, c), b);
  c.threads = 3;
  write_section_csv(compute_section(p, c), d);
  CHECK(a.str() == b.str());
  CHECK(a.str() == d.str());
}

TEST_CASE("crossing direction filter") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  auto c = section_config(p, 0.85, 2, 10);
  c.direction = CrossingDirection::Decreasing;
  for (const auto& pt : compute_section(p, c).points) CHECK(pt.state.v[0] < 0);
  c.direction = CrossingDirection::Increasing;
  for (const auto& pt : compute_section(p, c).points) CHECK(pt.state.v[0] > 0);
  CHECK(parse_direction("both") == CrossingDirection::Both);
  CHECK_THROWS_AS(parse_direction("up"), ValidationError);
}

TEST_CASE("Lyapunov estimates separate regular and chaotic motion") {
  const auto regular = SystemParams::make(2, -1, {0.1, 1});
  const auto start = *lift_to_energy_level(regular, 0.85, 0.3, 0);
  CHECK(estimate_mle(regular, start, 5000, 1e-2) <= 0.005);

  const auto chaotic = SystemParams::make(3, -1, {0.1, 1});
  const auto central = *lift_to_energy_level(chaotic, 0.85, 0, 0);
  CHECK(estimate_mle(chaotic, central, 5000, 1e-2) >= 0.01);

  const auto equal = SystemParams::make(3, -1, {1, 1});
  const auto s = *lift_to_energy_level(equal, 0.85, 0.3, 0);
  CHECK(estimate_mle(equal, s, 5000, 1e-2) <= 0.005);
}

TEST_CASE("rendering") {
  const auto p = SystemParams::make(2, -1, {0.1, 1});
  const auto set = compute_section(p, section_config(p, 0.85, 3, 10));
  std::ostringstream csv;
  write_section_csv(set, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "seed,idx,u2,v2,t");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 30);

  std::ostringstream svg;
  write_section_svg(set, svg);
  std::size_t circles = 0;
  for (std::size_t pos = 0; (pos = svg.str().find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  CHECK(circles == 30);

  SectionPointSet empty;
  std::ostringstream sink;
  CHECK_THROWS_AS(write_section_svg(empty, sink), EmptyInput);

  const auto dir = std::filesystem::temp_directory_path() / "critsys_render_test";
  std::filesystem::create_directories(dir);
  render(set, dir / "sec");
  CHECK(std::filesystem::exists(dir / "sec.csv"));
  CHECK(std::filesystem::exists(dir / "sec.svg"));
  std::filesystem::remove_all(dir);
}
