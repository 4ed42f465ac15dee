#ifndef MEL_SWEEP_HPP_
#define MEL_SWEEP_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mel/config.hpp"
#include "mel/divergence_sim.hpp"
#include "mel/scenario.hpp"

namespace mel {

struct SweepRow {
  std::string scheme;
  int num_learners = 0;
  double cycle_budget_s = 0.0;
  std::uint64_t seed = 0;
  double max_staleness = 0.0;
  double avg_staleness = 0.0;
  std::vector<std::int64_t> taus;
  std::vector<std::int64_t> batches;
  std::string status;  // "ok" or an error summary
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Maps a config token (ha, oracle, hu, sync) to the canonical scheme label
// (HA-async, HA-async-oracle, HU-async, HA-sync). Canonical labels pass
// through. Unknown tokens raise ConfigError.
std::string canonical_scheme(const std::string& token);

// Solves one scenario with one scheme; the returned allocation has been
// validated against the problem invariants.
IntegerAllocation solve_scheme(const Scenario& scenario,
                               const std::string& scheme, int oracle_tau_cap);

// Full grid K x T x seed x scheme. Per-cell failures land in the row status;
// the sweep itself never aborts.
SweepResult run_sweep(const ScenarioSpec& base, const SweepSpec& sweep,
                      int oracle_tau_cap);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_jsonlines(std::ostream& out, const SweepResult& result);

struct DivergenceRow {
  std::string scheme;
  int cycle = 0;
  double divergence = 0.0;
  double global_loss = 0.0;
  double max_staleness = 0.0;
};

// Random quadratic learners sharing one step size eta_scale / max beta.
// With identical = true every learner gets the same loss.
std::vector<ConvexLearner> make_convex_learners(int count, int dimension,
                                                double eta_scale,
                                                bool identical,
                                                std::uint64_t seed);

// Allocates with the given scheme, sizes the synthetic learners by the
// allocation's batches, and traces the aggregation-vs-centralized divergence.
std::vector<DivergenceRow> run_divergence_experiment(const ScenarioSpec& spec,
                                                     const std::string& scheme,
                                                     int cycles,
                                                     const SimSpec& sim,
                                                     int oracle_tau_cap);

void write_divergence_csv(std::ostream& out,
                          const std::vector<DivergenceRow>& rows);
void write_divergence_jsonlines(std::ostream& out,
                                const std::vector<DivergenceRow>& rows);

}  // namespace mel

#endif  // MEL_SWEEP_HPP_
