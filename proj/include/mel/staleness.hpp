#ifndef MEL_STALENESS_HPP_
#define MEL_STALENESS_HPP_

#include <vector>

namespace mel {

// One unordered learner pair, stored as 0-based indices with first < second.
struct LearnerPair {
  int first;
  int second;
};

// All K*(K-1)/2 pairs in lexicographic order.
struct PairMatrix {
  int num_learners = 0;
  std::vector<LearnerPair> pairs;
};

struct StalenessReport {
  double max_staleness = 0.0;
  double avg_staleness = 0.0;
  std::vector<double> per_pair;  // |tau_first - tau_second| per pair
};

// Multipliers of the decoupled staleness constraints: mu for
// tau_first - tau_second <= z, mu_prime for tau_second - tau_first <= z.
struct PairMultipliers {
  std::vector<double> mu;
  std::vector<double> mu_prime;
};

struct UVectors {
  std::vector<double> u;
  std::vector<double> u_prime;
};

PairMatrix pair_matrix(int num_learners);

StalenessReport staleness_report(const std::vector<double>& taus,
                                 const PairMatrix& pm);

// Gradient of the pairwise staleness terms with respect to each tau:
// u[k] sums mu over pairs with k first (+) or second (-);
// u_prime[k] is the same for mu_prime with signs flipped.
// Both vectors always sum to zero.
UVectors u_vectors_direct(const PairMatrix& pm, const PairMultipliers& mult);

// Closed-form block-index evaluation of the same vectors. Learner k's
// first-element pairs occupy one contiguous block; its second-element
// positions are start(j) + (k - j - 1) for j < k. Must match
// u_vectors_direct exactly.
UVectors u_vectors_indexed(int num_learners, const PairMultipliers& mult);

}  // namespace mel

#endif  // MEL_STALENESS_HPP_
