#include "mel/scenario.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mel/errors.hpp"

namespace mel {

namespace {

// Uniform double in (0, 1] from raw engine output; avoids the
// implementation-defined behavior of std::uniform_real_distribution so that
// scenarios are reproducible bit for bit.
double unit_draw(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return 1.0 - u;
}

}  // namespace

TaskProfile mnist_task_profile() {
  TaskProfile t;
  t.features = 784;
  t.data_precision_bits = 8.0;
  t.model_precision_bits = 32.0;
  t.model_size_slope = 0.0;
  t.model_size_intercept = 280440.0;
  t.complexity_cycles_per_sample = 1123736.0;
  t.dataset_size = 60000;
  return t;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  if (spec.num_learners < 1) {
    throw ConfigError("scenario.num_learners", "must be >= 1");
  }
  if (!(spec.radius_m > 0.0)) {
    throw ConfigError("scenario.radius_m", "must be > 0");
  }
  if (!(spec.node_bandwidth_hz > 0.0)) {
    throw ConfigError("scenario.node_bandwidth_hz", "must be > 0");
  }
  if (!(spec.cycle_budget_s > 0.0)) {
    throw ConfigError("scenario.cycle_budget_s", "must be > 0");
  }
  if (spec.clock_pool_hz.empty()) {
    throw ConfigError("scenario.clock_pool_hz", "must name at least one clock");
  }
  for (double c : spec.clock_pool_hz) {
    if (!(c > 0.0)) {
      throw ConfigError("scenario.clock_pool_hz", "clock rates must be > 0");
    }
  }
  if (spec.task.features < 1) {
    throw ConfigError("task.features", "must be >= 1");
  }
  if (spec.task.dataset_size < 1) {
    throw ConfigError("task.dataset_size", "must be >= 1");
  }
  if (!(spec.task.complexity_cycles_per_sample > 0.0)) {
    throw ConfigError("task.complexity_cycles_per_sample", "must be > 0");
  }
  if (spec.batch_lower < 1) {
    throw ConfigError("scenario.batch_lower", "must be >= 1");
  }
  const std::int64_t upper =
      spec.batch_upper == 0 ? spec.task.dataset_size : spec.batch_upper;
  if (upper < spec.batch_lower) {
    throw ConfigError("scenario.batch_upper", "must be >= batch_lower");
  }

  std::mt19937_64 rng(spec.seed);
  const int num = spec.num_learners;
  const int pool = static_cast<int>(spec.clock_pool_hz.size());

  Scenario sc;
  sc.learners.reserve(static_cast<std::size_t>(num));
  sc.distances_m.reserve(static_cast<std::size_t>(num));
  sc.problem.coefficients.reserve(static_cast<std::size_t>(num));

  for (int k = 0; k < num; ++k) {
    const double distance = spec.radius_m * unit_draw(rng);
    LearnerProfile lp;
    lp.id = k + 1;
    lp.channel.bandwidth_hz = spec.node_bandwidth_hz;
    lp.channel.tx_power_watts = dbm_to_watts(spec.tx_power_dbm);
    lp.channel.channel_gain = path_loss_gain(distance);
    lp.channel.noise_psd_watts_per_hz = dbm_to_watts(spec.noise_psd_dbm_hz);
    const int slot = std::min(pool - 1, k * pool / num);
    lp.compute.clock_hz = spec.clock_pool_hz[static_cast<std::size_t>(slot)];
    lp.mode = spec.mode;
    sc.distances_m.push_back(distance);
    sc.problem.coefficients.push_back(time_coefficients(lp, spec.task));
    sc.learners.push_back(lp);
  }

  sc.problem.cycle_budget_s = spec.cycle_budget_s;
  sc.problem.dataset_size = spec.task.dataset_size;
  sc.problem.batch_lower = spec.batch_lower;
  sc.problem.batch_upper = upper;
  return sc;
}

}  // namespace mel
