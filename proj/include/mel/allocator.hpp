#ifndef MEL_ALLOCATOR_HPP_
#define MEL_ALLOCATOR_HPP_

#include <cstdint>
#include <vector>

#include "mel/edge_model.hpp"
#include "mel/staleness.hpp"

namespace mel {

// Min-max staleness allocation instance: choose per-learner update counts
// tau_k and batch sizes d_k so that every learner's cycle time meets the
// budget, batches sum to the dataset size, and the spread of the tau's is
// as small as possible.
struct AllocationProblem {
  std::vector<TimeCoefficients> coefficients;
  double cycle_budget_s = 0.0;     // T
  std::int64_t dataset_size = 0;   // d
  std::int64_t batch_lower = 1;    // d_l
  std::int64_t batch_upper = 0;    // d_u

  int num_learners() const { return static_cast<int>(coefficients.size()); }
};

struct TauInterval {
  double lo;
  double hi;
};

// Solution of the continuous relaxation. Times equal the budget exactly
// (batches are read off the time-equality hyperbola), batches sum to the
// dataset size, and slack_z is the spread of the tau vector.
struct ContinuousAllocation {
  std::vector<double> taus;
  std::vector<double> batches;
  double slack_z = 0.0;
  std::vector<double> times;
};

// Integer-feasible allocation. Flooring turns the time equality into
// t_k <= T; batches sum to the dataset size exactly; tau_k >= 1 for every
// participating learner (tau_k == 0 marks a non-contributing learner).
struct IntegerAllocation {
  std::vector<std::int64_t> taus;
  std::vector<std::int64_t> batches;
  std::vector<double> times;
  StalenessReport report;
};

struct MultiplierSet {
  std::vector<double> lambda;    // time-equality constraints
  std::vector<double> alpha;     // tau >= 0
  double omega = 0.0;            // batch-sum constraint
  std::vector<double> nu;        // batch lower bounds
  std::vector<double> nu_prime;  // batch upper bounds
  PairMultipliers pair;
};

struct CertificateResult {
  MultiplierSet multipliers;
  double residual = 0.0;  // max |stationarity equation| over all 2K+1 of them
};

// Feasible tau interval per learner, from inverting the time law at the
// batch bounds. Throws InfeasibleLearner when a learner cannot finish even
// the smallest batch within the budget.
std::vector<TauInterval> learner_tau_bounds(const AllocationProblem& problem);

// Structured solve of the relaxation: the batch-sum residual is monotone in
// a common tau, so bisection on that tau (clamped per learner to its bounds)
// finds the solution.
ContinuousAllocation relaxed_solve(const AllocationProblem& problem);

// Closed-form stationarity solutions, evaluated exactly as written.
// k is a 0-based learner index into the multiplier vectors.
double kkt_tau_star(const MultiplierSet& mult, const TimeCoefficients& coeff,
                    int k);
double kkt_d_star(const MultiplierSet& mult, const TimeCoefficients& coeff,
                  const std::vector<double>& u,
                  const std::vector<double>& u_prime, int k);

// Post-hoc KKT certificate for an unclamped zero-spread continuous solution:
// nu = nu' = alpha = 0, lambda from d-stationarity, pair multipliers fit by
// nonnegative least squares on the pair-incidence system restricted to
// active pairs. Throws NoCertificate when the fit residual exceeds 1e-6
// (clamped solutions generally have no such certificate).
CertificateResult recover_multipliers(const ContinuousAllocation& cont,
                                      const AllocationProblem& problem);

// Floors the continuous solution and repairs it: absorb any batch deficit by
// decrementing the largest tau, trim any excess from the largest batches,
// then raise laggard taus while the budget allows.
IntegerAllocation integerize_sai(const ContinuousAllocation& cont,
                                 const AllocationProblem& problem);

// Exhaustive optimum over tau vectors in {1..tau_cap}^K, ranked by
// (max staleness, avg staleness, -sum tau_k*d_k). Guarded to K <= 5 and
// tau_cap <= 30.
IntegerAllocation brute_force_oracle(const AllocationProblem& problem,
                                     int tau_cap);

// Heterogeneity-unaware baseline: equal batch split, each learner does as
// many updates as fit. Learners that cannot fit one update get tau = 0 and
// are reported as non-contributing.
IntegerAllocation hu_equal_allocation(const AllocationProblem& problem);

// Synchronous baseline: the largest common tau all learners can sustain.
IntegerAllocation synchronous_baseline(const AllocationProblem& problem);

// Checks every IntegerAllocation invariant (budget, batch sum, bounds,
// participation); throws InvalidScenario on violation.
void validate_allocation(const AllocationProblem& problem,
                         const IntegerAllocation& alloc,
                         bool require_all_participate = true);

}  // namespace mel

#endif  // MEL_ALLOCATOR_HPP_
