#include "mel/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "mel/errors.hpp"

namespace mel {

namespace {

// Fixed 9-significant-digit formatting keeps CSV output byte-reproducible.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string join(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string canonical_scheme(const std::string& token) {
  if (token == "ha" || token == "HA-async") return "HA-async";
  if (token == "oracle" || token == "HA-async-oracle") return "HA-async-oracle";
  if (token == "hu" || token == "HU-async") return "HU-async";
  if (token == "sync" || token == "HA-sync") return "HA-sync";
  throw ConfigError("sweep.schemes", "unknown scheme '" + token + "'");
}

IntegerAllocation solve_scheme(const Scenario& scenario,
                               const std::string& scheme, int oracle_tau_cap) {
  const AllocationProblem& p = scenario.problem;
  if (scheme == "HA-async") {
    const IntegerAllocation alloc = integerize_sai(relaxed_solve(p), p);
    validate_allocation(p, alloc);
    return alloc;
  }
  if (scheme == "HA-async-oracle") {
    const IntegerAllocation alloc = brute_force_oracle(p, oracle_tau_cap);
    validate_allocation(p, alloc);
    return alloc;
  }
  if (scheme == "HU-async") {
    const IntegerAllocation alloc = hu_equal_allocation(p);
    validate_allocation(p, alloc, /*require_all_participate=*/false);
    return alloc;
  }
  if (scheme == "HA-sync") {
    const IntegerAllocation alloc = synchronous_baseline(p);
    validate_allocation(p, alloc);
    return alloc;
  }
  throw ConfigError("scheme", "unknown scheme '" + scheme + "'");
}

SweepResult run_sweep(const ScenarioSpec& base, const SweepSpec& sweep,
                      int oracle_tau_cap) {
  if (sweep.k_list.empty() || sweep.t_list.empty() || sweep.seeds.empty() ||
      sweep.schemes.empty()) {
    throw ConfigError("sweep", "grid must not be empty");
  }
  std::vector<std::string> schemes;
  schemes.reserve(sweep.schemes.size());
  for (const std::string& token : sweep.schemes) {
    schemes.push_back(canonical_scheme(token));
  }

  SweepResult result;
  for (int k : sweep.k_list) {
    for (double t : sweep.t_list) {
      for (std::uint64_t seed : sweep.seeds) {
        for (const std::string& scheme : schemes) {
          SweepRow row;
          row.scheme = scheme;
          row.num_learners = k;
          row.cycle_budget_s = t;
          row.seed = seed;
          try {
            ScenarioSpec spec = base;
            spec.num_learners = k;
            spec.cycle_budget_s = t;
            spec.seed = seed;
            const Scenario scenario = generate_scenario(spec);
            const IntegerAllocation alloc =
                solve_scheme(scenario, scheme, oracle_tau_cap);
            row.max_staleness = alloc.report.max_staleness;
            row.avg_staleness = alloc.report.avg_staleness;
            row.taus = alloc.taus;
            row.batches = alloc.batches;
            row.status = "ok";
          } catch (const Error& e) {
            row.max_staleness = std::nan("");
            row.avg_staleness = std::nan("");
            row.status = e.what();
          }
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "scheme,num_learners,cycle_budget_s,seed,max_staleness,"
         "avg_staleness,taus,batches,status\n";
  for (const SweepRow& row : result.rows) {
    out << row.scheme << ',' << row.num_learners << ','
        << fmt(row.cycle_budget_s) << ',' << row.seed << ','
        << fmt(row.max_staleness) << ',' << fmt(row.avg_staleness) << ','
        << join(row.taus) << ',' << join(row.batches) << ',' << row.status
        << '\n';
  }
}

void write_sweep_jsonlines(std::ostream& out, const SweepResult& result) {
  for (const SweepRow& row : result.rows) {
    nlohmann::json j;
    j["scheme"] = row.scheme;
    j["num_learners"] = row.num_learners;
    j["cycle_budget_s"] = row.cycle_budget_s;
    j["seed"] = row.seed;
    if (std::isnan(row.max_staleness)) {
      j["max_staleness"] = nullptr;
      j["avg_staleness"] = nullptr;
    } else {
      j["max_staleness"] = row.max_staleness;
      j["avg_staleness"] = row.avg_staleness;
    }
    j["taus"] = row.taus;
    j["batches"] = row.batches;
    j["status"] = row.status;
    out << j.dump() << '\n';
  }
}

std::vector<ConvexLearner> make_convex_learners(int count, int dimension,
                                                double eta_scale,
                                                bool identical,
                                                std::uint64_t seed) {
  if (count < 1) throw ConfigError("sim", "learner count must be >= 1");
  if (dimension < 1) throw ConfigError("sim.dimension", "must be >= 1");
  if (!(eta_scale > 0.0)) throw ConfigError("sim.eta_scale", "must be > 0");

  std::mt19937_64 rng(seed + 0x517cc1b727220a95ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));

  auto draw_learner = [&]() {
    ConvexLearner lr;
    lr.weight.assign(static_cast<std::size_t>(dimension), 0.0);
    lr.quad.resize(static_cast<std::size_t>(dimension) * dimension);
    lr.offset.resize(static_cast<std::size_t>(dimension));
    for (double& v : lr.quad) v = gauss(rng) * scale;
    for (double& v : lr.offset) v = gauss(rng);
    return lr;
  };

  std::vector<ConvexLearner> learners;
  learners.reserve(static_cast<std::size_t>(count));
  if (identical) {
    const ConvexLearner proto = draw_learner();
    learners.assign(static_cast<std::size_t>(count), proto);
  } else {
    for (int k = 0; k < count; ++k) learners.push_back(draw_learner());
  }

  double beta = 0.0;
  for (const ConvexLearner& lr : learners) {
    beta = std::max(beta, lr.smoothness());
  }
  const double eta = eta_scale / std::max(beta, 1e-12);
  for (ConvexLearner& lr : learners) lr.step_size = eta;
  return learners;
}

std::vector<DivergenceRow> run_divergence_experiment(const ScenarioSpec& spec,
                                                     const std::string& scheme,
                                                     int cycles,
                                                     const SimSpec& sim,
                                                     int oracle_tau_cap) {
  const std::string label = canonical_scheme(scheme);
  const Scenario scenario = generate_scenario(spec);
  const IntegerAllocation alloc =
      solve_scheme(scenario, label, oracle_tau_cap);
  std::vector<ConvexLearner> learners =
      make_convex_learners(spec.num_learners, sim.dimension, sim.eta_scale,
                           sim.identical_learners, spec.seed);
  const std::vector<TraceRow> trace =
      divergence_trace(alloc, std::move(learners), cycles);

  std::vector<DivergenceRow> rows;
  rows.reserve(trace.size());
  for (const TraceRow& t : trace) {
    rows.push_back({label, t.cycle, t.divergence, t.global_loss,
                    t.max_staleness});
  }
  return rows;
}

void write_divergence_csv(std::ostream& out,
                          const std::vector<DivergenceRow>& rows) {
  out << "scheme,cycle,divergence,global_loss,max_staleness\n";
  for (const DivergenceRow& row : rows) {
    out << row.scheme << ',' << row.cycle << ',' << fmt(row.divergence) << ','
        << fmt(row.global_loss) << ',' << fmt(row.max_staleness) << '\n';
  }
}

void write_divergence_jsonlines(std::ostream& out,
                                const std::vector<DivergenceRow>& rows) {
  for (const DivergenceRow& row : rows) {
    nlohmann::json j;
    j["scheme"] = row.scheme;
    j["cycle"] = row.cycle;
    j["divergence"] = row.divergence;
    j["global_loss"] = row.global_loss;
    j["max_staleness"] = row.max_staleness;
    out << j.dump() << '\n';
  }
}

}  // namespace mel
