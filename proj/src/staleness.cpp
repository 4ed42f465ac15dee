#include "mel/staleness.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mel/errors.hpp"

namespace mel {

namespace {

void check_multipliers(const PairMultipliers& mult, std::size_t num_pairs) {
  if (mult.mu.size() != num_pairs || mult.mu_prime.size() != num_pairs) {
    throw InvalidMultipliers("multiplier count does not match pair count");
  }
  for (std::size_t n = 0; n < num_pairs; ++n) {
    if (mult.mu[n] < 0.0 || mult.mu_prime[n] < 0.0) {
      throw InvalidMultipliers("pair multipliers must be nonnegative");
    }
  }
}

}  // namespace

PairMatrix pair_matrix(int num_learners) {
  if (num_learners < 1) {
    throw InvalidScenario("scenario needs at least one learner");
  }
  PairMatrix pm;
  pm.num_learners = num_learners;
  pm.pairs.reserve(static_cast<std::size_t>(num_learners) *
                   (num_learners - 1) / 2);
  for (int k = 0; k < num_learners; ++k) {
    for (int l = k + 1; l < num_learners; ++l) {
      pm.pairs.push_back({k, l});
    }
  }
  return pm;
}

StalenessReport staleness_report(const std::vector<double>& taus,
                                 const PairMatrix& pm) {
  if (static_cast<int>(taus.size()) != pm.num_learners) {
    throw InvalidScenario("tau vector length does not match pair matrix");
  }
  StalenessReport report;
  report.per_pair.reserve(pm.pairs.size());
  double sum = 0.0;
  for (const LearnerPair& p : pm.pairs) {
    const double gap = std::abs(taus[p.first] - taus[p.second]);
    report.per_pair.push_back(gap);
    report.max_staleness = std::max(report.max_staleness, gap);
    sum += gap;
  }
  report.avg_staleness =
      pm.pairs.empty() ? 0.0 : sum / static_cast<double>(pm.pairs.size());
  return report;
}

UVectors u_vectors_direct(const PairMatrix& pm, const PairMultipliers& mult) {
  check_multipliers(mult, pm.pairs.size());
  UVectors out;
  out.u.assign(pm.num_learners, 0.0);
  out.u_prime.assign(pm.num_learners, 0.0);
  for (std::size_t n = 0; n < pm.pairs.size(); ++n) {
    const LearnerPair& p = pm.pairs[n];
    out.u[p.first] += mult.mu[n];
    out.u[p.second] -= mult.mu[n];
    out.u_prime[p.first] -= mult.mu_prime[n];
    out.u_prime[p.second] += mult.mu_prime[n];
  }
  return out;
}

UVectors u_vectors_indexed(int num_learners, const PairMultipliers& mult) {
  if (num_learners < 1) {
    throw InvalidScenario("scenario needs at least one learner");
  }
  const std::size_t num_pairs =
      static_cast<std::size_t>(num_learners) * (num_learners - 1) / 2;
  check_multipliers(mult, num_pairs);

  // start[k] = index of the first pair whose first element is k.
  std::vector<std::size_t> start(num_learners + 1, 0);
  for (int k = 0; k < num_learners; ++k) {
    start[k + 1] = start[k] + static_cast<std::size_t>(num_learners - 1 - k);
  }

  UVectors out;
  out.u.assign(num_learners, 0.0);
  out.u_prime.assign(num_learners, 0.0);
  for (int k = 0; k < num_learners; ++k) {
    double first_mu = 0.0;
    double first_mu_prime = 0.0;
    for (std::size_t j = start[k]; j < start[k + 1]; ++j) {
      first_mu += mult.mu[j];
      first_mu_prime += mult.mu_prime[j];
    }
    double second_mu = 0.0;
    double second_mu_prime = 0.0;
    for (int j = 0; j < k; ++j) {
      const std::size_t pos = start[j] + static_cast<std::size_t>(k - j - 1);
      second_mu += mult.mu[pos];
      second_mu_prime += mult.mu_prime[pos];
    }
    out.u[k] = first_mu - second_mu;
    out.u_prime[k] = -first_mu_prime + second_mu_prime;
  }
  return out;
}

}  // namespace mel
