#include "mel/divergence_sim.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "mel/errors.hpp"
#include "mel/staleness.hpp"
#include "mel/sweep.hpp"

using namespace mel;

namespace {

ConvexLearner identity_learner(const std::vector<double>& target, double eta) {
  const int m = static_cast<int>(target.size());
  ConvexLearner lr;
  lr.weight.assign(target.size(), 0.0);
  lr.quad.assign(target.size() * target.size(), 0.0);
  for (int i = 0; i < m; ++i) lr.quad[i * m + i] = 1.0;
  lr.offset = target;
  lr.step_size = eta;
  lr.batch_size = 1;
  return lr;
}

IntegerAllocation make_alloc(std::vector<std::int64_t> taus,
                             std::vector<std::int64_t> batches) {
  IntegerAllocation alloc;
  std::vector<double> t(taus.begin(), taus.end());
  alloc.report = staleness_report(t, pair_matrix(static_cast<int>(taus.size())));
  alloc.taus = std::move(taus);
  alloc.batches = std::move(batches);
  return alloc;
}

}  // namespace

TEST_CASE("local descent steps") {
  SUBCASE("identity quadratic with eta = 1 lands on the target in one step") {
    ConvexLearner lr = identity_learner({3.0, -2.0}, 1.0);
    lr.weight = {10.0, 10.0};
    const std::vector<double> w = local_sgd(lr, 1);
    CHECK(w[0] == doctest::Approx(3.0));
    CHECK(w[1] == doctest::Approx(-2.0));
  }

  SUBCASE("scalar halving: two steps at eta = 0.5 from 1 give 0.25") {
    ConvexLearner lr = identity_learner({0.0}, 0.5);
    lr.weight = {1.0};
    const std::vector<double> w = local_sgd(lr, 2);
    CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("tau must be at least one") {
    ConvexLearner lr = identity_learner({0.0}, 0.5);
    CHECK_THROWS_AS(local_sgd(lr, 0), InvalidScenario);
  }

  SUBCASE("step size beyond 2/beta is flagged") {
    ConvexLearner lr = identity_learner({0.0}, 2.5);  // beta = 1
    CHECK(divergent_step(lr));
    lr.step_size = 0.5;
    CHECK_FALSE(divergent_step(lr));
  }
}

TEST_CASE("smoothness constant") {
  ConvexLearner lr;
  lr.weight = {0.0, 0.0};
  lr.quad = {2.0, 0.0, 0.0, 1.0};  // A = diag(2, 1) -> beta = 4
  lr.offset = {0.0, 0.0};
  lr.step_size = 0.1;
  CHECK(lr.smoothness() == doctest::Approx(4.0).epsilon(1e-9));

  SUBCASE("beta upper-bounds the observed gradient Lipschitz ratio") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 4;
      ConvexLearner random_lr;
      random_lr.weight.assign(m, 0.0);
      random_lr.quad.resize(m * m);
      random_lr.offset.resize(m);
      for (double& v : random_lr.quad) v = gauss(rng);
      for (double& v : random_lr.offset) v = gauss(rng);
      random_lr.step_size = 0.01;
      const double beta = random_lr.smoothness();

      std::vector<double> wa(m), wb(m);
      for (int i = 0; i < m; ++i) {
        wa[i] = gauss(rng);
        wb[i] = gauss(rng);
      }
      const std::vector<double> ga = random_lr.gradient(wa);
      const std::vector<double> gb = random_lr.gradient(wb);
      double num = 0.0;
      double den = 0.0;
      for (int i = 0; i < m; ++i) {
        num += (ga[i] - gb[i]) * (ga[i] - gb[i]);
        den += (wa[i] - wb[i]) * (wa[i] - wb[i]);
      }
      CHECK(std::sqrt(num) <= beta * std::sqrt(den) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("aggregation") {
  SUBCASE("equal batches average the weights") {
    std::vector<ConvexLearner> learners(2, identity_learner({0.0}, 0.1));
    learners[0].weight = {0.0};
    learners[1].weight = {2.0};
    const std::vector<double> w = aggregate(learners, {1, 1});
    CHECK(w[0] == doctest::Approx(1.0));
  }

  SUBCASE("batch weighting: (3,1) over weights 0 and 4 gives 1") {
    std::vector<ConvexLearner> learners(2, identity_learner({0.0}, 0.1));
    learners[0].weight = {0.0};
    learners[1].weight = {4.0};
    const std::vector<double> w = aggregate(learners, {3, 1});
    CHECK(w[0] == doctest::Approx(1.0));
  }

  SUBCASE("single learner aggregation is the identity") {
    std::vector<ConvexLearner> learners(1, identity_learner({0.0}, 0.1));
    learners[0].weight = {7.5};
    CHECK(aggregate(learners, {5})[0] == doctest::Approx(7.5));
  }

  SUBCASE("dimension mismatch is rejected") {
    std::vector<ConvexLearner> learners;
    learners.push_back(identity_learner({0.0}, 0.1));
    learners.push_back(identity_learner({0.0, 1.0}, 0.1));
    CHECK_THROWS_AS(aggregate(learners, {1, 1}), InvalidModel);
  }
}

TEST_CASE("global gradient and auxiliary step") {
  SUBCASE("global gradient is the batch-weighted mean of local gradients") {
    std::vector<ConvexLearner> learners;
    learners.push_back(identity_learner({1.0}, 0.1));
    learners.push_back(identity_learner({-3.0}, 0.1));
    const std::vector<double> w = {0.0};
    // gradients: (w - 1) = -1 and (w + 3) = 3; batches (3, 1): mean = 0
    const std::vector<double> g = global_gradient(learners, {3, 1}, w);
    CHECK(g[0] == doctest::Approx((3.0 * -1.0 + 1.0 * 3.0) / 4.0));
  }

  SUBCASE("auxiliary step is a plain descent step") {
    const std::vector<double> w = auxiliary_step({1.0, 2.0}, {0.5, -1.0}, 0.2);
    CHECK(w[0] == doctest::Approx(0.9));
    CHECK(w[1] == doctest::Approx(2.2));
  }

  SUBCASE("single learner: auxiliary trajectory equals the local one") {
    ConvexLearner lr = identity_learner({2.0}, 0.3);
    lr.weight = {-1.0};
    std::vector<ConvexLearner> learners = {lr};
    const IntegerAllocation alloc = make_alloc({3}, {4});
    const std::vector<TraceRow> trace = divergence_trace(alloc, learners, 10);
    for (const TraceRow& row : trace) {
      CHECK(row.divergence <= 1e-12);
    }
  }
}

TEST_CASE("divergence trace") {
  SUBCASE("identical learners with zero staleness never diverge") {
    std::vector<ConvexLearner> learners =
        make_convex_learners(4, 8, 0.1, /*identical=*/true, 99);
    const IntegerAllocation alloc = make_alloc({5, 5, 5, 5}, {10, 10, 10, 10});
    const std::vector<TraceRow> trace = divergence_trace(alloc, learners, 25);
    REQUIRE(trace.size() == 25);
    for (const TraceRow& row : trace) {
      CHECK(row.divergence <= 1e-12);
    }
  }

  SUBCASE("a straggler makes the trace dominate the synchronized run") {
    // matched learner sets; only the update counts differ
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
      std::vector<ConvexLearner> a =
          make_convex_learners(3, 8, 0.1, /*identical=*/false, seed);
      std::vector<ConvexLearner> b = a;
      const IntegerAllocation stale = make_alloc({4, 4, 1}, {10, 10, 10});
      const IntegerAllocation sync = make_alloc({4, 4, 4}, {10, 10, 10});
      const std::vector<TraceRow> trace_stale =
          divergence_trace(stale, std::move(a), 20);
      const std::vector<TraceRow> trace_sync =
          divergence_trace(sync, std::move(b), 20);
      for (std::size_t i = 0; i < trace_stale.size(); ++i) {
        CHECK(trace_stale[i].divergence >= trace_sync[i].divergence - 1e-12);
      }
    }
  }

  SUBCASE("per-cycle growth never exceeds the recorded budget") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = 2 + static_cast<int>(rng() % 5);
      std::vector<ConvexLearner> learners =
          make_convex_learners(k, 6, 0.1, false, rng());
      std::vector<std::int64_t> taus(k);
      std::vector<std::int64_t> batches(k);
      for (int i = 0; i < k; ++i) {
        taus[i] = 1 + static_cast<std::int64_t>(rng() % 6);
        batches[i] = 1 + static_cast<std::int64_t>(rng() % 20);
      }
      const IntegerAllocation alloc = make_alloc(taus, batches);
      const std::vector<TraceRow> trace =
          divergence_trace(alloc, std::move(learners), 15);
      for (const TraceRow& row : trace) {
        CHECK(row.divergence <=
              row.prev_divergence + row.bound_increment + 1e-9);
      }
    }
  }

  SUBCASE("trace length equals the cycle count") {
    std::vector<ConvexLearner> learners =
        make_convex_learners(2, 4, 0.1, false, 5);
    const IntegerAllocation alloc = make_alloc({2, 3}, {5, 5});
    CHECK(divergence_trace(alloc, learners, 7).size() == 7);
    CHECK(divergence_trace(alloc, learners, 0).empty());
  }

  SUBCASE("mismatched step sizes are rejected") {
    std::vector<ConvexLearner> learners =
        make_convex_learners(2, 4, 0.1, false, 5);
    learners[1].step_size *= 2.0;
    const IntegerAllocation alloc = make_alloc({1, 1}, {5, 5});
    CHECK_THROWS_AS(divergence_trace(alloc, std::move(learners), 3),
                    InvalidModel);
  }
}
