// Command-line front end: solve one instance, sweep a grid, compare the
// heuristic against the exhaustive oracle, trace model divergence, or print
// per-learner time-law coefficients.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mel/config.hpp"
#include "mel/errors.hpp"
#include "mel/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "csv";
};

mel::Config load(const CommonArgs& args) {
  mel::Config cfg = mel::load_config(args.config_path);
  if (args.seed) cfg.scenario.seed = *args.seed;
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw mel::ConfigError(path, "cannot open output file");
  }
  return out;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_format) {
  cmd->add_option("--config", args.config_path, "config file path")
      ->required();
  cmd->add_option("--seed", args.seed, "override scenario.seed");
  cmd->add_option("--out", args.out_path, "write output to this file");
  if (with_format) {
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonlines"}));
  }
}

void print_allocation(std::ostream& out, const mel::Scenario& scenario,
                      const mel::IntegerAllocation& alloc,
                      const std::string& scheme) {
  out << "scheme: " << scheme << "\n";
  out << "learners: " << scenario.problem.num_learners() << "\n";
  out << "cycle_budget_s: " << scenario.problem.cycle_budget_s << "\n";
  out << "  k   tau   batch      time_s\n";
  for (int k = 0; k < scenario.problem.num_learners(); ++k) {
    char line[96];
    std::snprintf(line, sizeof(line), "%3d  %4lld  %6lld  %10.6f\n", k + 1,
                  static_cast<long long>(alloc.taus[k]),
                  static_cast<long long>(alloc.batches[k]), alloc.times[k]);
    out << line;
  }
  out << "max_staleness: " << alloc.report.max_staleness << "\n";
  out << "avg_staleness: " << alloc.report.avg_staleness << "\n";
}

int cmd_solve(const CommonArgs& args) {
  const mel::Config cfg = load(args);
  const mel::Scenario scenario = mel::generate_scenario(cfg.scenario);
  const mel::IntegerAllocation alloc =
      mel::solve_scheme(scenario, "HA-async", cfg.oracle_tau_cap);
  print_allocation(std::cout, scenario, alloc, "HA-async");
  if (!args.out_path.empty()) {
    std::ofstream out = open_out(args.out_path);
    print_allocation(out, scenario, alloc, "HA-async");
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  const mel::Config cfg = load(args);
  const mel::SweepResult result =
      mel::run_sweep(cfg.scenario, cfg.sweep, cfg.oracle_tau_cap);
  auto write = [&](std::ostream& out) {
    if (args.format == "jsonlines") {
      mel::write_sweep_jsonlines(out, result);
    } else {
      mel::write_sweep_csv(out, result);
    }
  };
  if (args.out_path.empty()) {
    write(std::cout);
  } else {
    std::ofstream out = open_out(args.out_path);
    write(out);
  }
  return kExitOk;
}

int cmd_oracle(const CommonArgs& args) {
  const mel::Config cfg = load(args);
  const mel::Scenario scenario = mel::generate_scenario(cfg.scenario);
  const mel::IntegerAllocation oracle =
      mel::solve_scheme(scenario, "HA-async-oracle", cfg.oracle_tau_cap);
  const mel::IntegerAllocation sai =
      mel::solve_scheme(scenario, "HA-async", cfg.oracle_tau_cap);
  std::cout << "== heuristic (suggest-and-improve)\n";
  print_allocation(std::cout, scenario, sai, "HA-async");
  std::cout << "== oracle (exhaustive, tau_cap=" << cfg.oracle_tau_cap
            << ")\n";
  print_allocation(std::cout, scenario, oracle, "HA-async-oracle");
  std::cout << "staleness_gap: "
            << sai.report.max_staleness - oracle.report.max_staleness << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
  const mel::Config cfg = load(args);
  std::vector<mel::DivergenceRow> rows;
  for (const std::string& token : cfg.sweep.schemes) {
    const std::string scheme = mel::canonical_scheme(token);
    const std::vector<mel::DivergenceRow> part = mel::run_divergence_experiment(
        cfg.scenario, scheme, cfg.sim.cycles, cfg.sim, cfg.oracle_tau_cap);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  auto write = [&](std::ostream& out) {
    if (args.format == "jsonlines") {
      mel::write_divergence_jsonlines(out, rows);
    } else {
      mel::write_divergence_csv(out, rows);
    }
  };
  if (args.out_path.empty()) {
    write(std::cout);
  } else {
    std::ofstream out = open_out(args.out_path);
    write(out);
  }
  return kExitOk;
}

int cmd_profile(const CommonArgs& args) {
  const mel::Config cfg = load(args);
  const mel::Scenario scenario = mel::generate_scenario(cfg.scenario);
  std::cout << "  k  distance_m     clock_hz       rate_bps           c2"
               "           c1           c0\n";
  for (int k = 0; k < scenario.problem.num_learners(); ++k) {
    const mel::TimeCoefficients& c = scenario.problem.coefficients[k];
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%3d  %10.4f  %11.4g  %13.6g  %11.5g  %11.5g  %11.5g\n",
                  k + 1, scenario.distances_m[k],
                  scenario.learners[k].compute.clock_hz,
                  mel::achievable_rate(scenario.learners[k].channel), c.c2,
                  c.c1, c.c0);
    std::cout << line;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"staleness-minimizing task allocation for wireless edge learning"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "allocate one instance");
  add_common(solve, solve_args, false);

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a K x T x seed grid");
  add_common(sweep, sweep_args, true);

  CommonArgs oracle_args;
  CLI::App* oracle =
      app.add_subcommand("oracle", "compare the heuristic with the oracle");
  add_common(oracle, oracle_args, false);

  CommonArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "trace model divergence per scheme");
  add_common(simulate, sim_args, true);

  CommonArgs profile_args;
  CLI::App* profile =
      app.add_subcommand("profile", "print per-learner time coefficients");
  add_common(profile, profile_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (profile->parsed()) return cmd_profile(profile_args);
  } catch (const mel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mel::InfeasibleProblem& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mel::InfeasibleLearner& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
