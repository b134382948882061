// Command-line front end: one subcommand per module, results to stdout and
// to files under --out-dir.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "critsys/dynamics.hpp"
#include "critsys/errors.hpp"
#include "critsys/galois.hpp"
#include "critsys/integrals.hpp"
#include "critsys/integrator.hpp"
#include "critsys/kovacic.hpp"
#include "critsys/optimize.hpp"
#include "critsys/poincare.hpp"
#include "critsys/ratfn.hpp"
#include "critsys/rational.hpp"
#include "critsys/spectral.hpp"

namespace fs = std::filesystem;
using namespace critsys;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int grid = 2048;
  int threads = 1;
};

// Options shared by every subcommand that builds a Hamiltonian system.
struct SystemOptions {
  int k = 2;
  int epsilon = -1;
  std::vector<std::string> mu;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--k", k, "Degree of the coupling term (k >= 2)")->required();
    cmd->add_option("--mu", mu, "Frequencies, comma separated; decimals or fractions")->required()->delimiter(',');
    cmd->add_option("--epsilon", epsilon, "Sign of the coupling term, +1 or -1")->capture_default_str();
  }

  std::vector<Rational> exact() const {
    std::vector<Rational> out;
    for (const auto& s : mu) out.push_back(parse_rational(s));
    return out;
  }

  SystemParams params() const {
    std::vector<double> values;
    for (const auto& q : exact()) values.push_back(to_double(q));
    return SystemParams::make(k, epsilon, values);
  }
};

std::string fmt17(double x) { return fmt::format("{:.17g}", x); }

fs::path output_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Text goes to stdout and to out-dir/name.
void emit(const Globals& g, const std::string& name, const std::string& text) {
  std::cout << text;
  const auto path = output_path(g, name);
  open_output(path) << text;
}

PhaseState start_state(const SystemParams& p, const std::vector<double>& u, const std::vector<double>& v) {
  PhaseState s;
  for (int i = 0; i < p.m; ++i) {
    s.u.push_back(u.empty() ? 0.1 * (i + 1) : (i < static_cast<int>(u.size()) ? u[i] : 0.0));
    s.v.push_back(v.empty() ? 0.0 : (i < static_cast<int>(v.size()) ? v[i] : 0.0));
  }
  if (!u.empty() && static_cast<int>(u.size()) != p.m) throw ValidationError("--u needs one value per frequency");
  if (!v.empty() && static_cast<int>(v.size()) != p.m) throw ValidationError("--v needs one value per frequency");
  return s;
}

std::string branch_text(const Branch& b) {
  return fmt::format("branch {}: value {} iterations {} tangential_gradient {} {}\n", b.restart, fmt17(b.value),
                     b.iterations, fmt17(b.tangential_gradient), b.converged ? "converged" : "not-converged");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrability, sections and eigenvalue optimization for the critical Hamiltonian family"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file supplying any flag; command-line flags take precedence");

  Globals g;
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->envname("CRITSYS_OUT_DIR")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized steps")->capture_default_str();
  app.add_option("--grid", g.grid, "Grid cells for the optimizer")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Decide meromorphic integrability of the family");
  SystemOptions classify_sys;
  classify_sys.add_to(classify_cmd);

  // gap
  auto* gap_cmd = app.add_subcommand("gap", "Classify the two-frequency system of degree 2n");
  int gap_n = 1;
  std::vector<std::string> gap_mu;
  gap_cmd->add_option("--n", gap_n, "Half the coupling degree (n >= 1)")->required();
  gap_cmd->add_option("--mu", gap_mu, "mu1,mu2")->required()->delimiter(',')->expected(2);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate a trajectory to CSV");
  SystemOptions sim_sys;
  sim_sys.add_to(sim_cmd);
  std::vector<double> sim_u, sim_v;
  IntegratorConfig sim_cfg;
  std::string sim_scheme = "verlet";
  sim_cmd->add_option("--u", sim_u, "Initial positions")->delimiter(',');
  sim_cmd->add_option("--v", sim_v, "Initial momenta")->delimiter(',');
  sim_cmd->add_option("--dt", sim_cfg.dt, "Time step")->capture_default_str();
  sim_cmd->add_option("--t-end", sim_cfg.t_end, "Final time")->capture_default_str();
  sim_cmd->add_option("--stride", sim_cfg.record_stride, "Record every n-th step")->capture_default_str();
  sim_cmd->add_option("--scheme", sim_scheme, "verlet or yoshida4")->capture_default_str();

  // section
  auto* sec_cmd = app.add_subcommand("section", "Poincare section u1 = 0 at fixed energy (m = 2)");
  sec_cmd->set_help_flag("--help", "Print this help message and exit");  // frees --h for the energy
  SystemOptions sec_sys;
  sec_sys.add_to(sec_cmd);
  SectionConfig sec_cfg;
  sec_cfg.dt = 1e-2;
  int sec_seeds = 12;
  std::string sec_direction = "+";
  double sec_mle_time = 0.0;
  sec_cmd->add_option("--h", sec_cfg.h, "Energy level")->required();
  sec_cmd->add_option("--seeds", sec_seeds, "Seeds on the u2 axis")->capture_default_str();
  sec_cmd->add_option("--crossings", sec_cfg.crossings_per_seed, "Crossings per seed")->capture_default_str();
  sec_cmd->add_option("--direction", sec_direction, "+, - or both")->capture_default_str();
  sec_cmd->add_option("--dt", sec_cfg.dt, "Time step")->capture_default_str();
  sec_cmd->add_option("--t-max", sec_cfg.t_max, "Integration time limit per seed")->capture_default_str();
  sec_cmd->add_option("--mle-time", sec_mle_time, "If positive, estimate the MLE of each seed over this time");

  // integrals
  auto* int_cmd = app.add_subcommand("integrals", "Explicit first integrals and their conservation");
  SystemOptions int_sys;
  int_sys.add_to(int_cmd);
  bool int_check = false;
  std::vector<double> int_u, int_v;
  IntegralCheckConfig int_cfg;
  int_cmd->add_flag("--check", int_check, "Audit drift along a trajectory and brackets with H");
  int_cmd->add_option("--u", int_u, "Initial positions")->delimiter(',');
  int_cmd->add_option("--v", int_v, "Initial momenta")->delimiter(',');
  int_cmd->add_option("--t-end", int_cfg.integrator.t_end, "Trajectory length")->capture_default_str();
  int_cmd->add_option("--dt", int_cfg.integrator.dt, "Time step")->capture_default_str();
  int_cmd->add_option("--states", int_cfg.bracket_states, "Random states for the bracket test")->capture_default_str();

  // kovacic
  auto* kov_cmd = app.add_subcommand("kovacic", "Kovacic case-2 certificate");
  int kov_k = 0;
  std::string kov_r;
  auto* kov_k_opt = kov_cmd->add_option("--k", kov_k, "Normal-form variational equation for this k");
  auto* kov_r_opt = kov_cmd->add_option("--r", kov_r, "Rational function in z, e.g. \"-3/(16*z^2)\"");
  kov_k_opt->excludes(kov_r_opt);
  kov_r_opt->excludes(kov_k_opt);

  // eigs
  auto* eigs_cmd = app.add_subcommand("eigs", "Dirichlet eigenvalues of a sampled potential");
  std::string eigs_file;
  int eigs_m = 1;
  eigs_cmd->add_option("--q-file", eigs_file, "CSV with header x,q")->required();
  eigs_cmd->add_option("--m", eigs_m, "Number of eigenvalues")->required();

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "Extremal eigenvalue sums on the L^p sphere");
  OptimizeProblem opt_prob;
  std::string opt_sense = "min";
  int opt_restarts = 5;
  opt_cmd->add_option("--m", opt_prob.m, "Number of eigenvalues (m >= 2)")->required();
  opt_cmd->add_option("--p", opt_prob.p, "Lebesgue exponent (p > 1)")->required();
  opt_cmd->add_option("--r", opt_prob.r, "Radius (r > 0)")->required();
  opt_cmd->add_option("--sense", opt_sense, "min or max")->required()->check(CLI::IsMember({"min", "max"}));
  opt_cmd->add_option("--restarts", opt_restarts, "Seeded restarts")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  try {
    if (g.threads < 1) throw ValidationError("--threads must be >= 1");

    if (*classify_cmd) {
      ExactSystem sys{classify_sys.k, classify_sys.epsilon, classify_sys.exact()};
      emit(g, "verdict.txt", classify(sys).to_text());

    } else if (*gap_cmd) {
      emit(g, "gap_verdict.txt",
           classify_gap_system(gap_n, parse_rational(gap_mu.at(0)), parse_rational(gap_mu.at(1))).to_text());

    } else if (*sim_cmd) {
      const auto p = sim_sys.params();
      sim_cfg.scheme = parse_scheme(sim_scheme);
      const auto traj = integrate(p, start_state(p, sim_u, sim_v), sim_cfg);
      const auto path = output_path(g, "trajectory.csv");
      auto out = open_output(path);
      write_trajectory_csv(traj, out);
      std::cout << fmt::format("trajectory: {}\nsamples: {}\nenergy_drift: {}\n", path.string(), traj.size(),
                               fmt17(energy_drift(traj)));

    } else if (*sec_cmd) {
      const auto p = sec_sys.params();
      sec_cfg.direction = parse_direction(sec_direction);
      sec_cfg.threads = g.threads;
      sec_cfg.grid = default_seed_grid(p, sec_cfg.h, sec_seeds);
      const auto set = compute_section(p, sec_cfg);
      render(set, output_path(g, "section"));

      std::string text = fmt::format("section: {}\npoints: {}\n", output_path(g, "section.csv").string(),
                                     set.points.size());
      const auto integrals = applicable_integrals(p);
      for (const auto& s : set.seeds) {
        text += fmt::format("seed {}: u2 {} crossings {}{}{}", s.seed_id, fmt17(sec_cfg.grid[s.seed_id].u2),
                            s.crossings, s.escaped ? " escaped" : "", s.time_limit_reached ? " time-limit" : "");
        // Spread of each non-energy integral over this seed's section points.
        for (std::size_t j = 1; j < integrals.size(); ++j) {
          double lo = 0, hi = 0;
          bool first = true;
          for (const auto& pt : set.points) {
            if (pt.seed_id != s.seed_id) continue;
            const double val = eval_observable(integrals[j], p, pt.state);
            lo = first ? val : std::min(lo, val);
            hi = first ? val : std::max(hi, val);
            first = false;
          }
          if (!first) text += fmt::format(" spread[{}] {}", integrals[j].name(), fmt17(hi - lo));
        }
        if (sec_mle_time > 0 && s.lifted) {
          const auto start = lift_to_energy_level(p, sec_cfg.h, sec_cfg.grid[s.seed_id].u2, sec_cfg.grid[s.seed_id].v2);
          text += fmt::format(" mle {}", fmt17(estimate_mle(p, *start, sec_mle_time, sec_cfg.dt)));
        }
        text += "\n";
      }
      emit(g, "section.txt", text);

    } else if (*int_cmd) {
      const auto p = int_sys.params();
      const auto start = start_state(p, int_u, int_v);
      if (int_check) {
        int_cfg.seed = g.seed;
        emit(g, "integrals.txt", check_integrals(p, start, int_cfg).to_text());
      } else {
        std::string text;
        for (const auto& o : applicable_integrals(p)) {
          text += fmt::format("{}: {}\n", o.name(), fmt17(eval_observable(o, p, start)));
        }
        emit(g, "integrals.txt", text);
      }

    } else if (*kov_cmd) {
      if (!*kov_k_opt && !*kov_r_opt) throw ValidationError("kovacic needs --k or --r");
      const RatFn r = *kov_k_opt ? anve_r(kov_k) : parse_ratfn(kov_r);
      emit(g, "certificate.txt", certify_case2(r).to_text());

    } else if (*eigs_cmd) {
      std::ifstream in(eigs_file);
      if (!in) throw IoError("cannot read " + eigs_file);
      const auto q = read_potential_csv(in);
      std::ostringstream csv;
      write_eigs_csv(dirichlet_eigs(q, eigs_m), csv);
      emit(g, "eigs.csv", csv.str());

    } else if (*opt_cmd) {
      opt_prob.sense = opt_sense == "max" ? Sense::Max : Sense::Min;
      OptimizerConfig cfg;
      cfg.n = g.grid;
      cfg.restarts = opt_restarts;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      const auto res = optimize_sum(opt_prob, cfg);
      const auto sol = extract_critical(res, opt_prob);
      const auto rep = verify_critical(sol, opt_prob);

      auto qout = open_output(output_path(g, "q.csv"));
      write_potential_csv(res.q, qout);
      auto uout = open_output(output_path(g, "u.csv"));
      write_critical_csv(sol, uout);

      std::string text = fmt::format("m: {}\np: {}\nr: {}\nsense: {}\ngrid: {}\nseed: {}\n", opt_prob.m,
                                     fmt17(opt_prob.p), fmt17(opt_prob.r), opt_sense, cfg.n, cfg.seed);
      for (const auto& b : res.branches) text += branch_text(b);
      text += fmt::format("best_restart: {}\nvalue: {}\nconverged: {}\n", res.best_restart, fmt17(res.value),
                          res.converged ? "yes" : "no");
      text += fmt::format("c: {}\nepsilon: {}\nfit_residual: {}\n", fmt17(sol.c), sol.epsilon, fmt17(sol.fit_residual));
      for (std::size_t i = 0; i < sol.mu.size(); ++i) text += fmt::format("mu[{}]: {}\n", i + 1, fmt17(sol.mu[i]));
      text += rep.to_text();
      emit(g, "optimize.txt", text);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
