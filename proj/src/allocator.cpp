#include "mel/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mel/errors.hpp"

namespace mel {

namespace {

constexpr int kBisectionMaxIters = 200;
constexpr double kCertificateTol = 1e-6;

void validate_problem(const AllocationProblem& p) {
  const int k = p.num_learners();
  if (k < 1) throw InvalidScenario("problem needs at least one learner");
  if (!(p.cycle_budget_s > 0.0) || !std::isfinite(p.cycle_budget_s)) {
    throw InvalidScenario("cycle budget must be positive and finite");
  }
  if (p.dataset_size < 1) throw InvalidScenario("dataset size must be >= 1");
  if (p.batch_lower < 1 || p.batch_lower > p.batch_upper) {
    throw InvalidScenario("batch bounds must satisfy 1 <= lower <= upper");
  }
  if (static_cast<std::int64_t>(k) * p.batch_lower > p.dataset_size ||
      static_cast<std::int64_t>(k) * p.batch_upper < p.dataset_size) {
    throw InvalidScenario(
        "dataset size not reachable within batch bounds (K*d_l <= d <= K*d_u)");
  }
  for (const TimeCoefficients& c : p.coefficients) {
    if (!(c.c2 > 0.0) || c.c1 < 0.0 || c.c0 < 0.0 || !std::isfinite(c.c2) ||
        !std::isfinite(c.c1) || !std::isfinite(c.c0)) {
      throw InvalidScenario("time coefficients must be finite with c2 > 0");
    }
  }
}

// Batch size that fills the budget exactly at a given (possibly fractional)
// update count.
double batch_from_tau(const TimeCoefficients& c, double budget, double tau) {
  const double denom = c.c2 * tau + c.c1;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return (budget - c.c0) / denom;
}

// Largest integer batch a learner can finish at integer tau, clipped to d_u.
std::int64_t batch_cap(const TimeCoefficients& c, double budget,
                       std::int64_t tau, std::int64_t batch_upper) {
  const double raw = batch_from_tau(c, budget, static_cast<double>(tau));
  if (!std::isfinite(raw)) return batch_upper;
  if (raw <= 0.0) return 0;
  const double capped = std::min(raw, static_cast<double>(batch_upper));
  return static_cast<std::int64_t>(std::floor(capped));
}

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

StalenessReport integer_report(const std::vector<std::int64_t>& taus) {
  std::vector<double> t(taus.begin(), taus.end());
  return staleness_report(t, pair_matrix(static_cast<int>(taus.size())));
}

std::vector<double> integer_times(const AllocationProblem& p,
                                  const std::vector<std::int64_t>& taus,
                                  const std::vector<std::int64_t>& batches) {
  std::vector<double> times(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) {
    times[k] = cycle_time(p.coefficients[k], static_cast<double>(taus[k]),
                          static_cast<double>(batches[k]));
  }
  return times;
}

// Removes `excess` samples, always from the currently largest batch; ties go
// to the lowest learner index first. Processes whole tiers at once.
void trim_excess(std::vector<std::int64_t>& batches, std::int64_t excess,
                 std::int64_t batch_lower) {
  while (excess > 0) {
    std::int64_t top = batch_lower;
    for (std::int64_t b : batches) top = std::max(top, b);
    if (top <= batch_lower) {
      throw InfeasibleProblem("cannot trim batches below the lower bound");
    }
    std::int64_t next = batch_lower;
    std::vector<std::size_t> tier;
    for (std::size_t k = 0; k < batches.size(); ++k) {
      if (batches[k] == top) {
        tier.push_back(k);
      } else {
        next = std::max(next, batches[k]);
      }
    }
    const std::int64_t tier_size = static_cast<std::int64_t>(tier.size());
    const std::int64_t room = tier_size * (top - next);
    if (excess >= room) {
      for (std::size_t k : tier) batches[k] = next;
      excess -= room;
    } else {
      const std::int64_t per = excess / tier_size;
      const std::int64_t rem = excess % tier_size;
      for (std::int64_t i = 0; i < tier_size; ++i) {
        batches[tier[static_cast<std::size_t>(i)]] = top - per - (i < rem ? 1 : 0);
      }
      excess = 0;
    }
  }
}

// -------- nonnegative least squares (Lawson-Hanson) --------

// Solves (A + ridge*I) x = b in place; A is n*n row-major.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b,
                              int n) {
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += a[static_cast<std::size_t>(i) * n + i];
  const double ridge = 1e-12 * std::max(trace / std::max(n, 1), 1e-30);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] += ridge;
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
          std::abs(a[static_cast<std::size_t>(pivot) * n + col])) {
        pivot = r;
      }
    }
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a[static_cast<std::size_t>(col) * n + c],
                  a[static_cast<std::size_t>(pivot) * n + c]);
      }
      std::swap(b[col], b[pivot]);
    }
    const double piv = a[static_cast<std::size_t>(col) * n + col];
    if (piv == 0.0) continue;
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * n + col] / piv;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) {
        a[static_cast<std::size_t>(r) * n + c] -=
            factor * a[static_cast<std::size_t>(col) * n + c];
      }
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) {
      s -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
    }
    const double piv = a[static_cast<std::size_t>(r) * n + r];
    x[static_cast<std::size_t>(r)] = piv != 0.0 ? s / piv : 0.0;
  }
  return x;
}

// min ||E x - f|| subject to x >= 0. E is m*n row-major. Problem sizes here
// are tiny (m <= K+1, n <= K*(K-1) + 2).
std::vector<double> nnls(const std::vector<double>& e,
                         const std::vector<double>& f, int m, int n) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<double> resid(f);

  auto refresh_residual = [&]() {
    resid = f;
    for (int r = 0; r < m; ++r) {
      double dot = 0.0;
      for (int c = 0; c < n; ++c) {
        dot += e[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
      }
      resid[static_cast<std::size_t>(r)] -= dot;
    }
  };

  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  const double grad_tol = 1e-12 * std::max(scale, 1.0);

  const int max_outer = 3 * n + 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    // Gradient of 0.5*||Ex - f||^2 is -E^T resid; pick the most improving
    // inactive coordinate.
    int best = -1;
    double best_w = grad_tol;
    for (int c = 0; c < n; ++c) {
      if (passive[static_cast<std::size_t>(c)]) continue;
      double w = 0.0;
      for (int r = 0; r < m; ++r) {
        w += e[static_cast<std::size_t>(r) * n + c] * resid[static_cast<std::size_t>(r)];
      }
      if (w > best_w) {
        best_w = w;
        best = c;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      std::vector<int> cols;
      for (int c = 0; c < n; ++c) {
        if (passive[static_cast<std::size_t>(c)]) cols.push_back(c);
      }
      const int p = static_cast<int>(cols.size());
      // Normal equations on the passive set.
      std::vector<double> ata(static_cast<std::size_t>(p) * p, 0.0);
      std::vector<double> atf(static_cast<std::size_t>(p), 0.0);
      for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
          double dot = 0.0;
          for (int r = 0; r < m; ++r) {
            dot += e[static_cast<std::size_t>(r) * n + cols[static_cast<std::size_t>(i)]] *
                   e[static_cast<std::size_t>(r) * n + cols[static_cast<std::size_t>(j)]];
          }
          ata[static_cast<std::size_t>(i) * p + j] = dot;
          ata[static_cast<std::size_t>(j) * p + i] = dot;
        }
        double dot = 0.0;
        for (int r = 0; r < m; ++r) {
          dot += e[static_cast<std::size_t>(r) * n + cols[static_cast<std::size_t>(i)]] *
                 f[static_cast<std::size_t>(r)];
        }
        atf[static_cast<std::size_t>(i)] = dot;
      }
      std::vector<double> z = solve_spd(ata, atf, p);

      bool all_positive = true;
      for (double v : z) {
        if (v <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) {
        for (int i = 0; i < p; ++i) {
          x[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])] =
              z[static_cast<std::size_t>(i)];
        }
        break;
      }
      // Step toward z only as far as nonnegativity allows, then drop
      // coordinates that hit zero.
      double alpha = 1.0;
      for (int i = 0; i < p; ++i) {
        const double zi = z[static_cast<std::size_t>(i)];
        if (zi <= 0.0) {
          const double xi = x[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])];
          const double denom = xi - zi;
          if (denom > 0.0) alpha = std::min(alpha, xi / denom);
        }
      }
      for (int i = 0; i < p; ++i) {
        const std::size_t c = static_cast<std::size_t>(cols[static_cast<std::size_t>(i)]);
        x[c] += alpha * (z[static_cast<std::size_t>(i)] - x[c]);
        if (x[c] <= 1e-14) {
          x[c] = 0.0;
          passive[c] = false;
        }
      }
    }
    refresh_residual();
  }
  return x;
}

}  // namespace

std::vector<TauInterval> learner_tau_bounds(const AllocationProblem& problem) {
  validate_problem(problem);
  std::vector<TauInterval> bounds;
  bounds.reserve(problem.coefficients.size());
  for (std::size_t k = 0; k < problem.coefficients.size(); ++k) {
    const TimeCoefficients& c = problem.coefficients[k];
    const double budget = problem.cycle_budget_s;
    const double dl = static_cast<double>(problem.batch_lower);
    const double du = static_cast<double>(problem.batch_upper);
    if (budget <= c.c0 + c.c1 * dl) {
      throw InfeasibleLearner(
          static_cast<int>(k) + 1,
          "learner " + std::to_string(k + 1) +
              " cannot finish the smallest batch within the budget");
    }
    TauInterval iv;
    iv.hi = (budget - c.c0 - c.c1 * dl) / (c.c2 * dl);
    iv.lo = std::max(0.0, (budget - c.c0 - c.c1 * du) / (c.c2 * du));
    bounds.push_back(iv);
  }
  return bounds;
}

ContinuousAllocation relaxed_solve(const AllocationProblem& problem) {
  const std::vector<TauInterval> bounds = learner_tau_bounds(problem);
  const int num = problem.num_learners();
  const double budget = problem.cycle_budget_s;
  const double target = static_cast<double>(problem.dataset_size);

  auto total_batch = [&](double tau) {
    double sum = 0.0;
    for (int k = 0; k < num; ++k) {
      const double t = clamp(tau, bounds[static_cast<std::size_t>(k)].lo,
                             bounds[static_cast<std::size_t>(k)].hi);
      sum += batch_from_tau(problem.coefficients[static_cast<std::size_t>(k)],
                            budget, t);
    }
    return sum;
  };

  double lo = bounds[0].lo;
  double hi = bounds[0].hi;
  for (const TauInterval& iv : bounds) {
    lo = std::min(lo, iv.lo);
    hi = std::max(hi, iv.hi);
  }

  const double feas_tol = 1e-9 * target;
  if (total_batch(lo) < target - feas_tol) {
    throw InfeasibleProblem(
        "even the largest feasible batches cannot reach the dataset size");
  }
  if (total_batch(hi) > target + feas_tol) {
    throw InfeasibleProblem(
        "even the smallest feasible batches exceed the dataset size");
  }

  // total_batch is continuous and nonincreasing in tau, so bisection finds
  // the common tau that balances the batch sum.
  double root = lo;
  if (total_batch(lo) <= target) {
    root = lo;
  } else if (total_batch(hi) >= target) {
    root = hi;
  } else {
    double a = lo;
    double b = hi;
    for (int iter = 0; iter < kBisectionMaxIters; ++iter) {
      const double mid = 0.5 * (a + b);
      const double g = total_batch(mid);
      if (std::abs(g - target) <= 1e-12 * target ||
          (b - a) <= 1e-12 * std::max(1.0, std::abs(mid))) {
        a = b = mid;
        break;
      }
      if (g > target) {
        a = mid;
      } else {
        b = mid;
      }
    }
    root = 0.5 * (a + b);
  }

  ContinuousAllocation out;
  out.taus.resize(static_cast<std::size_t>(num));
  out.batches.resize(static_cast<std::size_t>(num));
  out.times.resize(static_cast<std::size_t>(num));
  double tau_min = std::numeric_limits<double>::infinity();
  double tau_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    out.taus[i] = clamp(root, bounds[i].lo, bounds[i].hi);
    out.batches[i] = batch_from_tau(problem.coefficients[i], budget, out.taus[i]);
    out.times[i] = cycle_time(problem.coefficients[i], out.taus[i], out.batches[i]);
    tau_min = std::min(tau_min, out.taus[i]);
    tau_max = std::max(tau_max, out.taus[i]);
  }
  out.slack_z = tau_max - tau_min;
  return out;
}

double kkt_tau_star(const MultiplierSet& mult, const TimeCoefficients& coeff,
                    int k) {
  const std::size_t i = static_cast<std::size_t>(k);
  const double lambda = mult.lambda.at(i);
  if (lambda == 0.0) {
    throw DegenerateMultiplier("lambda is zero; tau* is undefined");
  }
  return -(lambda * coeff.c1 + mult.nu.at(i) + mult.nu_prime.at(i) +
           mult.omega) /
         (lambda * coeff.c2);
}

double kkt_d_star(const MultiplierSet& mult, const TimeCoefficients& coeff,
                  const std::vector<double>& u,
                  const std::vector<double>& u_prime, int k) {
  const std::size_t i = static_cast<std::size_t>(k);
  const double lambda = mult.lambda.at(i);
  if (lambda == 0.0) {
    throw DegenerateMultiplier("lambda is zero; d* is undefined");
  }
  return -(u.at(i) + u_prime.at(i) + mult.alpha.at(i)) / (lambda * coeff.c2);
}

CertificateResult recover_multipliers(const ContinuousAllocation& cont,
                                      const AllocationProblem& problem) {
  validate_problem(problem);
  const int num = problem.num_learners();
  if (static_cast<int>(cont.taus.size()) != num ||
      static_cast<int>(cont.batches.size()) != num) {
    throw InvalidScenario("allocation size does not match problem");
  }
  const PairMatrix pm = pair_matrix(num);
  const std::size_t num_pairs = pm.pairs.size();

  // Complementary slackness: only pairs whose staleness constraint is tight
  // may carry a multiplier. At z = 0 every pair is tight.
  const double z = cont.slack_z;
  const double gap_tol = 1e-9 * std::max(1.0, z);
  std::vector<std::size_t> active_mu;
  std::vector<std::size_t> active_mu_prime;
  for (std::size_t n = 0; n < num_pairs; ++n) {
    const double gap =
        cont.taus[static_cast<std::size_t>(pm.pairs[n].first)] -
        cont.taus[static_cast<std::size_t>(pm.pairs[n].second)];
    if (gap >= z - gap_tol) active_mu.push_back(n);
    if (-gap >= z - gap_tol) active_mu_prime.push_back(n);
  }

  // rho_k links the two stationarity equations once lambda is eliminated via
  // lambda_k = -omega / (c2 tau_k + c1).
  std::vector<double> rho(static_cast<std::size_t>(num));
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const TimeCoefficients& c = problem.coefficients[i];
    rho[i] = c.c2 * cont.batches[i] / (c.c2 * cont.taus[i] + c.c1);
  }

  // Unknowns: active mu entries, active mu' entries, omega split into a
  // positive and a negative part. Rows: K tau-stationarity equations plus
  // the z-stationarity normalization sum(mu) + sum(mu') = 1.
  const int n_mu = static_cast<int>(active_mu.size());
  const int n_mu_p = static_cast<int>(active_mu_prime.size());
  const int n_cols = n_mu + n_mu_p + 2;
  const bool has_pairs = num_pairs > 0;
  const int n_rows = num + (has_pairs ? 1 : 0);

  std::vector<double> e(static_cast<std::size_t>(n_rows) * n_cols, 0.0);
  std::vector<double> f(static_cast<std::size_t>(n_rows), 0.0);
  for (int j = 0; j < n_mu; ++j) {
    const LearnerPair& p = pm.pairs[active_mu[static_cast<std::size_t>(j)]];
    e[static_cast<std::size_t>(p.first) * n_cols + j] = 1.0;
    e[static_cast<std::size_t>(p.second) * n_cols + j] = -1.0;
  }
  for (int j = 0; j < n_mu_p; ++j) {
    const LearnerPair& p =
        pm.pairs[active_mu_prime[static_cast<std::size_t>(j)]];
    e[static_cast<std::size_t>(p.first) * n_cols + n_mu + j] = -1.0;
    e[static_cast<std::size_t>(p.second) * n_cols + n_mu + j] = 1.0;
  }
  for (int k = 0; k < num; ++k) {
    e[static_cast<std::size_t>(k) * n_cols + n_mu + n_mu_p] =
        -rho[static_cast<std::size_t>(k)];
    e[static_cast<std::size_t>(k) * n_cols + n_mu + n_mu_p + 1] =
        rho[static_cast<std::size_t>(k)];
  }
  if (has_pairs) {
    for (int j = 0; j < n_mu + n_mu_p; ++j) {
      e[static_cast<std::size_t>(num) * n_cols + j] = 1.0;
    }
    f[static_cast<std::size_t>(num)] = 1.0;
  }

  const std::vector<double> x = nnls(e, f, n_rows, n_cols);

  MultiplierSet mult;
  mult.pair.mu.assign(num_pairs, 0.0);
  mult.pair.mu_prime.assign(num_pairs, 0.0);
  for (int j = 0; j < n_mu; ++j) {
    mult.pair.mu[active_mu[static_cast<std::size_t>(j)]] =
        x[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < n_mu_p; ++j) {
    mult.pair.mu_prime[active_mu_prime[static_cast<std::size_t>(j)]] =
        x[static_cast<std::size_t>(n_mu + j)];
  }
  mult.omega = x[static_cast<std::size_t>(n_mu + n_mu_p)] -
               x[static_cast<std::size_t>(n_mu + n_mu_p + 1)];
  mult.lambda.assign(static_cast<std::size_t>(num), 0.0);
  mult.alpha.assign(static_cast<std::size_t>(num), 0.0);
  mult.nu.assign(static_cast<std::size_t>(num), 0.0);
  mult.nu_prime.assign(static_cast<std::size_t>(num), 0.0);
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const TimeCoefficients& c = problem.coefficients[i];
    mult.lambda[i] = -mult.omega / (c.c2 * cont.taus[i] + c.c1);
  }

  // Max absolute stationarity residual over the 2K (+1) equations.
  const UVectors uv = u_vectors_direct(pm, mult.pair);
  double residual = 0.0;
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const TimeCoefficients& c = problem.coefficients[i];
    const double d_eq =
        mult.lambda[i] * (c.c2 * cont.taus[i] + c.c1) + mult.omega;
    const double tau_eq = mult.lambda[i] * c.c2 * cont.batches[i] + uv.u[i] +
                          uv.u_prime[i] + mult.alpha[i];
    residual = std::max(residual, std::abs(d_eq));
    residual = std::max(residual, std::abs(tau_eq));
  }
  if (has_pairs) {
    double sum = 0.0;
    for (std::size_t n = 0; n < num_pairs; ++n) {
      sum += mult.pair.mu[n] + mult.pair.mu_prime[n];
    }
    residual = std::max(residual, std::abs(1.0 - sum));
  }

  if (residual > kCertificateTol) {
    throw NoCertificate("stationarity residual " + std::to_string(residual) +
                        " exceeds tolerance; solution has active clamps");
  }
  return {mult, residual};
}

IntegerAllocation integerize_sai(const ContinuousAllocation& cont,
                                 const AllocationProblem& problem) {
  validate_problem(problem);
  const int num = problem.num_learners();
  if (static_cast<int>(cont.taus.size()) != num) {
    throw InvalidScenario("allocation size does not match problem");
  }
  const double budget = problem.cycle_budget_s;

  // Suggest: floor the relaxed taus (at least one update each) and take the
  // largest batch each learner can still finish. The small slack absorbs
  // bisection error when the relaxed tau sits on an integer.
  std::vector<std::int64_t> taus(static_cast<std::size_t>(num));
  std::vector<std::int64_t> caps(static_cast<std::size_t>(num));
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    taus[i] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor(cont.taus[i] + 1e-9)));
    caps[i] = batch_cap(problem.coefficients[i], budget, taus[i],
                        problem.batch_upper);
    while (caps[i] < problem.batch_lower && taus[i] > 1) {
      --taus[i];
      caps[i] = batch_cap(problem.coefficients[i], budget, taus[i],
                          problem.batch_upper);
    }
    if (caps[i] < problem.batch_lower) {
      throw InfeasibleProblem("learner " + std::to_string(k + 1) +
                              " cannot fit the smallest batch at one update");
    }
  }

  // Improve (a): if capacity falls short of the dataset, decrement the
  // largest tau (ties: largest capacity gain, then lowest index).
  auto total_cap = [&]() {
    return std::accumulate(caps.begin(), caps.end(), std::int64_t{0});
  };
  while (total_cap() < problem.dataset_size) {
    std::int64_t top_tau = 0;
    for (std::int64_t t : taus) {
      if (t >= 2) top_tau = std::max(top_tau, t);
    }
    if (top_tau == 0) {
      throw InfeasibleProblem("no tau decrement can absorb the batch deficit");
    }
    int pick = -1;
    std::int64_t pick_gain = -1;
    for (int k = 0; k < num; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      if (taus[i] != top_tau) continue;
      const std::int64_t gain = batch_cap(problem.coefficients[i], budget,
                                          taus[i] - 1, problem.batch_upper) -
                                caps[i];
      if (gain > pick_gain) {
        pick_gain = gain;
        pick = k;
      }
    }
    const std::size_t i = static_cast<std::size_t>(pick);
    --taus[i];
    caps[i] = batch_cap(problem.coefficients[i], budget, taus[i],
                        problem.batch_upper);
  }

  // Improve (b): batches start at the caps; trim the surplus from the
  // largest batches.
  std::vector<std::int64_t> batches = caps;
  trim_excess(batches, total_cap() - problem.dataset_size,
              problem.batch_lower);

  // Improve (c): raise laggard taus while the budget still holds at the
  // assigned batch.
  bool changed = true;
  while (changed) {
    changed = false;
    std::int64_t top_tau = 0;
    for (std::int64_t t : taus) top_tau = std::max(top_tau, t);
    for (int k = 0; k < num; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      if (taus[i] >= top_tau) continue;
      const double t_next =
          cycle_time(problem.coefficients[i], static_cast<double>(taus[i] + 1),
                     static_cast<double>(batches[i]));
      if (t_next <= budget) {
        ++taus[i];
        changed = true;
      }
    }
  }

  IntegerAllocation out;
  out.taus = std::move(taus);
  out.batches = std::move(batches);
  out.times = integer_times(problem, out.taus, out.batches);
  out.report = integer_report(out.taus);
  return out;
}

IntegerAllocation brute_force_oracle(const AllocationProblem& problem,
                                     int tau_cap) {
  validate_problem(problem);
  const int num = problem.num_learners();
  if (num > 5 || tau_cap > 30 || tau_cap < 1) {
    throw InvalidScenario(
        "enumeration guard: oracle requires K <= 5 and tau_cap <= 30");
  }
  const double budget = problem.cycle_budget_s;
  const PairMatrix pm = pair_matrix(num);

  // cap table: cap[k][tau-1]
  std::vector<std::vector<std::int64_t>> cap_table(
      static_cast<std::size_t>(num));
  for (int k = 0; k < num; ++k) {
    auto& row = cap_table[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(tau_cap));
    for (int t = 1; t <= tau_cap; ++t) {
      row[static_cast<std::size_t>(t - 1)] =
          batch_cap(problem.coefficients[static_cast<std::size_t>(k)], budget,
                    t, problem.batch_upper);
    }
  }

  auto greedy_batches = [&](const std::vector<int>& taus) {
    // Everyone starts at the lower bound; the remainder goes to learners in
    // descending tau (ties by index) up to their caps.
    std::vector<std::int64_t> batches(static_cast<std::size_t>(num),
                                      problem.batch_lower);
    std::int64_t remaining =
        problem.dataset_size - static_cast<std::int64_t>(num) * problem.batch_lower;
    std::vector<int> order(static_cast<std::size_t>(num));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return taus[static_cast<std::size_t>(a)] > taus[static_cast<std::size_t>(b)];
    });
    for (int k : order) {
      if (remaining <= 0) break;
      const std::size_t i = static_cast<std::size_t>(k);
      const std::int64_t cap =
          cap_table[i][static_cast<std::size_t>(taus[i] - 1)];
      const std::int64_t add = std::min(remaining, cap - batches[i]);
      batches[i] += add;
      remaining -= add;
    }
    return batches;
  };

  std::vector<int> taus(static_cast<std::size_t>(num), 1);
  bool found = false;
  std::vector<int> best_taus;
  std::vector<std::int64_t> best_batches;
  std::int64_t best_max_gap = 0;
  std::int64_t best_sum_gap = 0;
  std::int64_t best_work = 0;

  while (true) {
    // Feasibility of the current tau vector.
    std::int64_t cap_sum = 0;
    bool ok = true;
    for (int k = 0; k < num; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      const std::int64_t cap =
          cap_table[i][static_cast<std::size_t>(taus[i] - 1)];
      if (cap < problem.batch_lower) {
        ok = false;
        break;
      }
      cap_sum += cap;
    }
    if (ok && cap_sum >= problem.dataset_size) {
      std::int64_t max_gap = 0;
      std::int64_t sum_gap = 0;
      for (const LearnerPair& p : pm.pairs) {
        const std::int64_t gap =
            std::abs(static_cast<std::int64_t>(taus[static_cast<std::size_t>(p.first)]) -
                     taus[static_cast<std::size_t>(p.second)]);
        max_gap = std::max(max_gap, gap);
        sum_gap += gap;
      }
      const bool staleness_at_least_as_good =
          !found || max_gap < best_max_gap ||
          (max_gap == best_max_gap && sum_gap <= best_sum_gap);
      if (staleness_at_least_as_good) {
        const std::vector<std::int64_t> batches = greedy_batches(taus);
        std::int64_t work = 0;
        for (int k = 0; k < num; ++k) {
          work += static_cast<std::int64_t>(taus[static_cast<std::size_t>(k)]) *
                  batches[static_cast<std::size_t>(k)];
        }
        const bool better =
            !found || max_gap < best_max_gap ||
            (max_gap == best_max_gap &&
             (sum_gap < best_sum_gap ||
              (sum_gap == best_sum_gap && work > best_work)));
        if (better) {
          found = true;
          best_taus = taus;
          best_batches = batches;
          best_max_gap = max_gap;
          best_sum_gap = sum_gap;
          best_work = work;
        }
      }
    }
    // Odometer increment, last index fastest.
    int pos = num - 1;
    while (pos >= 0 && taus[static_cast<std::size_t>(pos)] == tau_cap) {
      taus[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++taus[static_cast<std::size_t>(pos)];
  }

  if (!found) {
    throw InfeasibleProblem("no tau vector up to the cap is feasible");
  }

  IntegerAllocation out;
  out.taus.assign(best_taus.begin(), best_taus.end());
  out.batches = std::move(best_batches);
  out.times = integer_times(problem, out.taus, out.batches);
  out.report = integer_report(out.taus);
  return out;
}

IntegerAllocation hu_equal_allocation(const AllocationProblem& problem) {
  validate_problem(problem);
  const int num = problem.num_learners();
  const std::int64_t base = problem.dataset_size / num;
  const std::int64_t rem = problem.dataset_size % num;

  IntegerAllocation out;
  out.taus.resize(static_cast<std::size_t>(num));
  out.batches.resize(static_cast<std::size_t>(num));
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    out.batches[i] = base + (k < rem ? 1 : 0);
    const TimeCoefficients& c = problem.coefficients[i];
    const double b = static_cast<double>(out.batches[i]);
    const double room = problem.cycle_budget_s - c.c0 - c.c1 * b;
    out.taus[i] = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor(room / (c.c2 * b))));
  }
  out.times = integer_times(problem, out.taus, out.batches);
  out.report = integer_report(out.taus);
  return out;
}

IntegerAllocation synchronous_baseline(const AllocationProblem& problem) {
  validate_problem(problem);
  const int num = problem.num_learners();
  const double budget = problem.cycle_budget_s;

  auto caps_at = [&](std::int64_t tau) {
    std::vector<std::int64_t> caps(static_cast<std::size_t>(num));
    for (int k = 0; k < num; ++k) {
      caps[static_cast<std::size_t>(k)] =
          batch_cap(problem.coefficients[static_cast<std::size_t>(k)], budget,
                    tau, problem.batch_upper);
    }
    return caps;
  };
  auto feasible = [&](std::int64_t tau) {
    std::int64_t sum = 0;
    for (std::int64_t cap : caps_at(tau)) {
      if (cap < problem.batch_lower) return false;
      sum += cap;
    }
    return sum >= problem.dataset_size;
  };

  if (!feasible(1)) {
    throw InfeasibleProblem("no common tau is feasible");
  }
  // Largest common tau that still lets every learner reach d_l. Capacity is
  // nonincreasing in tau, so binary search applies.
  const std::vector<TauInterval> bounds = learner_tau_bounds(problem);
  double hi_real = bounds[0].hi;
  for (const TauInterval& iv : bounds) hi_real = std::min(hi_real, iv.hi);
  std::int64_t hi =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(hi_real)));
  std::int64_t lo = 1;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }

  IntegerAllocation out;
  out.taus.assign(static_cast<std::size_t>(num), lo);
  out.batches = caps_at(lo);
  std::int64_t excess = std::accumulate(out.batches.begin(), out.batches.end(),
                                        std::int64_t{0}) -
                        problem.dataset_size;
  trim_excess(out.batches, excess, problem.batch_lower);
  out.times = integer_times(problem, out.taus, out.batches);
  out.report = integer_report(out.taus);
  return out;
}

void validate_allocation(const AllocationProblem& problem,
                         const IntegerAllocation& alloc,
                         bool require_all_participate) {
  const int num = problem.num_learners();
  if (static_cast<int>(alloc.taus.size()) != num ||
      static_cast<int>(alloc.batches.size()) != num) {
    throw InvalidScenario("allocation size does not match problem");
  }
  std::int64_t batch_sum = 0;
  const double budget_tol = problem.cycle_budget_s * (1.0 + 1e-9);
  for (int k = 0; k < num; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (alloc.taus[i] < 0) {
      throw InvalidScenario("negative tau for learner " + std::to_string(k + 1));
    }
    if (require_all_participate && alloc.taus[i] < 1) {
      throw InvalidScenario("learner " + std::to_string(k + 1) +
                            " does not participate (tau = 0)");
    }
    if (alloc.batches[i] < problem.batch_lower ||
        alloc.batches[i] > problem.batch_upper) {
      throw InvalidScenario("batch out of bounds for learner " +
                            std::to_string(k + 1));
    }
    batch_sum += alloc.batches[i];
    if (alloc.taus[i] >= 1) {
      const double t =
          cycle_time(problem.coefficients[i], static_cast<double>(alloc.taus[i]),
                     static_cast<double>(alloc.batches[i]));
      if (t > budget_tol) {
        throw InvalidScenario("cycle time exceeds the budget for learner " +
                              std::to_string(k + 1));
      }
    }
  }
  if (batch_sum != problem.dataset_size) {
    throw InvalidScenario("batches do not sum to the dataset size");
  }
  const StalenessReport expect = integer_report(alloc.taus);
  if (std::abs(expect.max_staleness - alloc.report.max_staleness) > 1e-12 ||
      std::abs(expect.avg_staleness - alloc.report.avg_staleness) > 1e-12) {
    throw InvalidScenario("staleness report does not match the tau vector");
  }
}

}  // namespace mel
