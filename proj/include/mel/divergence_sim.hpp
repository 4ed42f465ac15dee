#ifndef MEL_DIVERGENCE_SIM_HPP_
#define MEL_DIVERGENCE_SIM_HPP_

#include <cstdint>
#include <vector>

#include "mel/allocator.hpp"

namespace mel {

// Synthetic learner with quadratic loss F(w) = 0.5 * ||A w - b||^2.
// Convex by construction; the smoothness constant is the largest
// eigenvalue of A^T A.
struct ConvexLearner {
  std::vector<double> weight;  // local model, dimension M
  std::int64_t batch_size = 0;
  std::vector<double> quad;    // A, row-major M x M
  std::vector<double> offset;  // b, dimension M
  double step_size = 0.0;      // eta

  int dim() const { return static_cast<int>(offset.size()); }
  double loss(const std::vector<double>& w) const;
  std::vector<double> gradient(const std::vector<double>& w) const;
  double smoothness() const;
};

struct AggregationState {
  std::vector<double> global_weight;
  std::vector<double> auxiliary_weight;
  int cycle_index = 0;
  std::vector<std::int64_t> update_counts;
};

// One aggregation cycle of the divergence simulation.
// bound_increment is the recorded budget for the divergence growth this
// cycle; divergence <= prev_divergence + bound_increment must always hold.
struct TraceRow {
  int cycle = 0;
  double divergence = 0.0;   // ||w - w_hat|| after this aggregation
  double global_loss = 0.0;  // F(w) at the aggregated weight
  double max_staleness = 0.0;
  double prev_divergence = 0.0;
  double bound_increment = 0.0;
};

// Applies tau full-gradient steps from the learner's current weight.
// The deterministic full gradient stands in for SGD at this scale.
std::vector<double> local_sgd(const ConvexLearner& learner, int tau);

// True when the step size exceeds the stable range 2/beta.
bool divergent_step(const ConvexLearner& learner);

// Batch-weighted mean of the learners' current weights.
std::vector<double> aggregate(const std::vector<ConvexLearner>& learners,
                              const std::vector<std::int64_t>& batches);

// Gradient of the global loss F(w) = (1/d) sum d_k F_k(w).
std::vector<double> global_gradient(const std::vector<ConvexLearner>& learners,
                                    const std::vector<std::int64_t>& batches,
                                    const std::vector<double>& w);

// One centralized descent step on the global loss.
std::vector<double> auxiliary_step(const std::vector<double>& auxiliary_weight,
                                   const std::vector<double>& gradient,
                                   double step_size);

// Runs `cycles` aggregation rounds: every learner descends tau_k steps from
// the shared global weight, the orchestrator aggregates, and the auxiliary
// model advances max_k tau_k centralized steps. Records the divergence
// ||w - w_hat|| after each aggregation together with the per-cycle growth
// budget.
std::vector<TraceRow> divergence_trace(const IntegerAllocation& allocation,
                                       std::vector<ConvexLearner> learners,
                                       int cycles);

}  // namespace mel

#endif  // MEL_DIVERGENCE_SIM_HPP_
