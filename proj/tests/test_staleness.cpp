#include "mel/staleness.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "mel/errors.hpp"

using namespace mel;

TEST_CASE("pair matrix enumerates all unordered pairs lexicographically") {
  SUBCASE("K = 4 reproduces the six-pair matrix") {
    const PairMatrix pm = pair_matrix(4);
    REQUIRE(pm.pairs.size() == 6);
    // 1-based: (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
    const int expect[6][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    for (int n = 0; n < 6; ++n) {
      CHECK(pm.pairs[n].first + 1 == expect[n][0]);
      CHECK(pm.pairs[n].second + 1 == expect[n][1]);
    }
  }

  SUBCASE("K = 1 has no pairs") {
    CHECK(pair_matrix(1).pairs.empty());
  }

  SUBCASE("K = 20 has 190 pairs") {
    CHECK(pair_matrix(20).pairs.size() == 190);
  }

  SUBCASE("K = 0 is rejected") {
    CHECK_THROWS_AS(pair_matrix(0), InvalidScenario);
  }
}

TEST_CASE("staleness report") {
  SUBCASE("equal taus have zero staleness") {
    const PairMatrix pm = pair_matrix(3);
    const StalenessReport r = staleness_report({3.0, 3.0, 3.0}, pm);
    CHECK(r.max_staleness == 0.0);
    CHECK(r.avg_staleness == 0.0);
  }

  SUBCASE("tau = (5,3,4)") {
    const PairMatrix pm = pair_matrix(3);
    const StalenessReport r = staleness_report({5.0, 3.0, 4.0}, pm);
    REQUIRE(r.per_pair.size() == 3);
    CHECK(r.per_pair[0] == 2.0);  // (1,2)
    CHECK(r.per_pair[1] == 1.0);  // (1,3)
    CHECK(r.per_pair[2] == 1.0);  // (2,3)
    CHECK(r.max_staleness == 2.0);
    CHECK(r.avg_staleness == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  }

  SUBCASE("two learners: max equals avg equals the gap") {
    const PairMatrix pm = pair_matrix(2);
    const StalenessReport r = staleness_report({7.25, 3.0}, pm);
    CHECK(r.max_staleness == doctest::Approx(4.25));
    CHECK(r.avg_staleness == doctest::Approx(4.25));
  }

  SUBCASE("length mismatch is rejected") {
    const PairMatrix pm = pair_matrix(3);
    CHECK_THROWS_AS(staleness_report({1.0, 2.0}, pm), InvalidScenario);
  }

  SUBCASE("permutation invariance and avg <= max") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> tau(0.0, 9.0);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = 2 + static_cast<int>(rng() % 7);
      const PairMatrix pm = pair_matrix(k);
      std::vector<double> taus(k);
      for (double& t : taus) t = tau(rng);
      const StalenessReport a = staleness_report(taus, pm);
      std::shuffle(taus.begin(), taus.end(), rng);
      const StalenessReport b = staleness_report(taus, pm);
      CHECK(a.max_staleness == doctest::Approx(b.max_staleness).epsilon(1e-15));
      CHECK(a.avg_staleness == doctest::Approx(b.avg_staleness).epsilon(1e-15));
      CHECK(a.avg_staleness <= a.max_staleness + 1e-15);
    }
  }
}

TEST_CASE("multiplier gradient vectors") {
  SUBCASE("all-zero multipliers give zero vectors") {
    const PairMatrix pm = pair_matrix(5);
    PairMultipliers mult;
    mult.mu.assign(pm.pairs.size(), 0.0);
    mult.mu_prime.assign(pm.pairs.size(), 0.0);
    const UVectors uv = u_vectors_direct(pm, mult);
    for (double v : uv.u) CHECK(v == 0.0);
    for (double v : uv.u_prime) CHECK(v == 0.0);
  }

  SUBCASE("K = 2 single pair signs") {
    const PairMatrix pm = pair_matrix(2);
    PairMultipliers mult{{1.0}, {0.0}};
    const UVectors uv = u_vectors_direct(pm, mult);
    CHECK(uv.u[0] == 1.0);
    CHECK(uv.u[1] == -1.0);
    CHECK(uv.u_prime[0] == 0.0);
    CHECK(uv.u_prime[1] == 0.0);
  }

  SUBCASE("K = 4 sign sum over the pair matrix") {
    const PairMatrix pm = pair_matrix(4);
    PairMultipliers mult{{1, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 0, 0}};
    const UVectors uv = u_vectors_direct(pm, mult);
    CHECK(uv.u[0] == 1.0);
    CHECK(uv.u[1] == -1.0);
    CHECK(uv.u[2] == 1.0);
    CHECK(uv.u[3] == -1.0);
  }

  SUBCASE("negative multipliers are rejected") {
    const PairMatrix pm = pair_matrix(2);
    PairMultipliers mult{{-0.5}, {0.0}};
    CHECK_THROWS_AS(u_vectors_direct(pm, mult), InvalidMultipliers);
  }

  SUBCASE("indexed block form: K = 2 block layout") {
    // learner 1 owns the single pair as first element; learner 2 owns none
    PairMultipliers mult{{0.7}, {0.2}};
    const UVectors uv = u_vectors_indexed(2, mult);
    CHECK(uv.u[0] == doctest::Approx(0.7));
    CHECK(uv.u[1] == doctest::Approx(-0.7));
    CHECK(uv.u_prime[0] == doctest::Approx(-0.2));
    CHECK(uv.u_prime[1] == doctest::Approx(0.2));
  }

  SUBCASE("indexed equals direct on random draws, and both sum to zero") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> mu(0.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 2 + static_cast<int>(rng() % 9);  // 2..10
      const PairMatrix pm = pair_matrix(k);
      PairMultipliers mult;
      mult.mu.resize(pm.pairs.size());
      mult.mu_prime.resize(pm.pairs.size());
      for (double& v : mult.mu) v = mu(rng);
      for (double& v : mult.mu_prime) v = mu(rng);

      const UVectors direct = u_vectors_direct(pm, mult);
      const UVectors indexed = u_vectors_indexed(k, mult);
      double sum_u = 0.0;
      double sum_up = 0.0;
      for (int i = 0; i < k; ++i) {
        CHECK(std::abs(direct.u[i] - indexed.u[i]) <= 1e-12);
        CHECK(std::abs(direct.u_prime[i] - indexed.u_prime[i]) <= 1e-12);
        sum_u += direct.u[i];
        sum_up += direct.u_prime[i];
      }
      CHECK(std::abs(sum_u) <= 1e-12);
      CHECK(std::abs(sum_up) <= 1e-12);
    }
  }
}
