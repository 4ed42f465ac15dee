#include "mel/divergence_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mel/errors.hpp"

namespace mel {

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> matvec(const std::vector<double>& a, int m,
                           const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  for (int r = 0; r < m; ++r) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) {
      s += a[static_cast<std::size_t>(r) * m + c] * x[static_cast<std::size_t>(c)];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
  return y;
}

}  // namespace

double ConvexLearner::loss(const std::vector<double>& w) const {
  const int m = dim();
  if (static_cast<int>(w.size()) != m) {
    throw InvalidModel("weight dimension mismatch");
  }
  const std::vector<double> r = matvec(quad, m, w);
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = r[static_cast<std::size_t>(i)] - offset[static_cast<std::size_t>(i)];
    s += e * e;
  }
  return 0.5 * s;
}

std::vector<double> ConvexLearner::gradient(const std::vector<double>& w) const {
  const int m = dim();
  if (static_cast<int>(w.size()) != m) {
    throw InvalidModel("weight dimension mismatch");
  }
  // A^T (A w - b)
  std::vector<double> r = matvec(quad, m, w);
  for (int i = 0; i < m; ++i) {
    r[static_cast<std::size_t>(i)] -= offset[static_cast<std::size_t>(i)];
  }
  std::vector<double> g(static_cast<std::size_t>(m), 0.0);
  for (int c = 0; c < m; ++c) {
    double s = 0.0;
    for (int row = 0; row < m; ++row) {
      s += quad[static_cast<std::size_t>(row) * m + c] * r[static_cast<std::size_t>(row)];
    }
    g[static_cast<std::size_t>(c)] = s;
  }
  return g;
}

double ConvexLearner::smoothness() const {
  // Largest eigenvalue of A^T A by power iteration; the matrix is PSD so
  // the iteration converges from any start with a nonzero projection.
  const int m = dim();
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    v[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(i + 1);
  }
  double eig = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> av = matvec(quad, m, v);
    // w = A^T (A v)
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int row = 0; row < m; ++row) {
        s += quad[static_cast<std::size_t>(row) * m + c] * av[static_cast<std::size_t>(row)];
      }
      w[static_cast<std::size_t>(c)] = s;
    }
    const double n = norm(w);
    if (n == 0.0) return 0.0;
    eig = n / std::max(norm(v), 1e-300);
    for (int i = 0; i < m; ++i) {
      v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / n;
    }
  }
  return eig;
}

bool divergent_step(const ConvexLearner& learner) {
  const double beta = learner.smoothness();
  return beta > 0.0 && learner.step_size > 2.0 / beta;
}

std::vector<double> local_sgd(const ConvexLearner& learner, int tau) {
  if (tau < 1) {
    throw InvalidScenario("local updates require tau >= 1");
  }
  std::vector<double> w = learner.weight;
  for (int step = 0; step < tau; ++step) {
    const std::vector<double> g = learner.gradient(w);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= learner.step_size * g[i];
    }
  }
  return w;
}

std::vector<double> aggregate(const std::vector<ConvexLearner>& learners,
                              const std::vector<std::int64_t>& batches) {
  if (learners.empty() || learners.size() != batches.size()) {
    throw InvalidModel("learner and batch counts must match");
  }
  const int m = learners[0].dim();
  std::vector<double> w(static_cast<std::size_t>(m), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < learners.size(); ++k) {
    if (learners[k].dim() != m ||
        static_cast<int>(learners[k].weight.size()) != m) {
      throw InvalidModel("weight dimension mismatch");
    }
    const double dk = static_cast<double>(batches[k]);
    total += dk;
    for (int i = 0; i < m; ++i) {
      w[static_cast<std::size_t>(i)] +=
          dk * learners[k].weight[static_cast<std::size_t>(i)];
    }
  }
  if (!(total > 0.0)) throw InvalidModel("batch weights must be positive");
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> global_gradient(const std::vector<ConvexLearner>& learners,
                                    const std::vector<std::int64_t>& batches,
                                    const std::vector<double>& w) {
  if (learners.empty() || learners.size() != batches.size()) {
    throw InvalidModel("learner and batch counts must match");
  }
  std::vector<double> g(w.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < learners.size(); ++k) {
    const double dk = static_cast<double>(batches[k]);
    total += dk;
    const std::vector<double> gk = learners[k].gradient(w);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += dk * gk[i];
  }
  for (double& x : g) x /= total;
  return g;
}

std::vector<double> auxiliary_step(const std::vector<double>& auxiliary_weight,
                                   const std::vector<double>& gradient,
                                   double step_size) {
  if (auxiliary_weight.size() != gradient.size()) {
    throw InvalidModel("gradient dimension mismatch");
  }
  std::vector<double> w = auxiliary_weight;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step_size * gradient[i];
  return w;
}

std::vector<TraceRow> divergence_trace(const IntegerAllocation& allocation,
                                       std::vector<ConvexLearner> learners,
                                       int cycles) {
  const std::size_t num = learners.size();
  if (num == 0 || allocation.taus.size() != num ||
      allocation.batches.size() != num) {
    throw InvalidModel("allocation does not match the learner set");
  }
  const int m = learners[0].dim();
  const double eta = learners[0].step_size;
  for (const ConvexLearner& lr : learners) {
    if (lr.dim() != m) throw InvalidModel("weight dimension mismatch");
    if (lr.step_size != eta) {
      throw InvalidModel("learners must share one step size");
    }
  }
  for (std::size_t k = 0; k < num; ++k) {
    learners[k].batch_size = allocation.batches[k];
  }

  double total_batch = 0.0;
  for (std::int64_t b : allocation.batches) {
    total_batch += static_cast<double>(b);
  }
  std::int64_t tau_max = 0;
  for (std::int64_t t : allocation.taus) tau_max = std::max(tau_max, t);

  std::vector<double> global_w = learners[0].weight;
  std::vector<double> aux_w = global_w;

  std::vector<TraceRow> trace;
  trace.reserve(static_cast<std::size_t>(std::max(cycles, 0)));
  double prev_div = 0.0;

  for (int cycle = 0; cycle < cycles; ++cycle) {
    // Auxiliary trajectory for this cycle: tau_max centralized steps, with
    // the global gradient recorded at every iterate.
    std::vector<std::vector<double>> aux_grads;
    aux_grads.reserve(static_cast<std::size_t>(tau_max));
    std::vector<double> y = aux_w;
    for (std::int64_t j = 0; j < tau_max; ++j) {
      aux_grads.push_back(global_gradient(learners, allocation.batches, y));
      y = auxiliary_step(y, aux_grads.back(), eta);
    }

    // Local descent from the shared global weight, accumulating each
    // learner's gradient-path bound: the drift against the auxiliary
    // iterates over its own steps plus the auxiliary motion over the
    // staleness gap.
    double weighted_path = 0.0;
    for (std::size_t k = 0; k < num; ++k) {
      ConvexLearner& lr = learners[k];
      lr.weight = global_w;
      double path = 0.0;
      const std::int64_t tau_k = allocation.taus[k];
      std::vector<double> x = lr.weight;
      for (std::int64_t j = 0; j < tau_k; ++j) {
        const std::vector<double> gk = lr.gradient(x);
        double drift = 0.0;
        for (int i = 0; i < m; ++i) {
          const double diff =
              gk[static_cast<std::size_t>(i)] -
              aux_grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
          drift += diff * diff;
        }
        path += std::sqrt(drift);
        for (int i = 0; i < m; ++i) {
          x[static_cast<std::size_t>(i)] -= eta * gk[static_cast<std::size_t>(i)];
        }
      }
      for (std::int64_t j = tau_k; j < tau_max; ++j) {
        path += norm(aux_grads[static_cast<std::size_t>(j)]);
      }
      lr.weight = std::move(x);
      weighted_path += static_cast<double>(allocation.batches[k]) * path;
    }

    global_w = aggregate(learners, allocation.batches);
    aux_w = y;

    double div = 0.0;
    for (int i = 0; i < m; ++i) {
      const double diff = global_w[static_cast<std::size_t>(i)] -
                          aux_w[static_cast<std::size_t>(i)];
      div += diff * diff;
    }
    div = std::sqrt(div);

    double loss = 0.0;
    for (std::size_t k = 0; k < num; ++k) {
      loss += static_cast<double>(allocation.batches[k]) *
              learners[k].loss(global_w);
    }
    loss /= total_batch;

    TraceRow row;
    row.cycle = cycle;
    row.divergence = div;
    row.global_loss = loss;
    row.max_staleness = allocation.report.max_staleness;
    row.prev_divergence = prev_div;
    row.bound_increment = eta / total_batch * weighted_path;
    trace.push_back(row);
    prev_div = div;
  }
  return trace;
}

}  // namespace mel
