#ifndef MEL_SCENARIO_HPP_
#define MEL_SCENARIO_HPP_

#include <cstdint>
#include <vector>

#include "mel/allocator.hpp"
#include "mel/edge_model.hpp"

namespace mel {

// MNIST profile: 784 features at 8 bits each, a fixed-size model of 280,440
// parameters stored at 32 bits (8,974,080 bits on the wire), 1,123,736
// cycles per sample pass, 60,000 samples.
TaskProfile mnist_task_profile();

struct ScenarioSpec {
  int num_learners = 20;
  double radius_m = 50.0;
  double node_bandwidth_hz = 5e6;
  double tx_power_dbm = 23.0;
  double noise_psd_dbm_hz = -174.0;
  // Clock pool with the mixing rule: the first ceil(K/P) learners get
  // pool[0], the next slice pool[1], and so on.
  std::vector<double> clock_pool_hz = {2.4e9, 7e8};
  TaskProfile task = mnist_task_profile();
  double cycle_budget_s = 7.5;
  std::int64_t batch_lower = 1;
  std::int64_t batch_upper = 0;  // 0 means "use the dataset size"
  LearningMode mode = LearningMode::kParallelized;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::vector<LearnerProfile> learners;
  std::vector<double> distances_m;
  AllocationProblem problem;
};

// Deterministic from the seed: distances uniform in (0, radius], clocks
// assigned by the mixing rule, coefficients from the time law.
Scenario generate_scenario(const ScenarioSpec& spec);

}  // namespace mel

#endif  // MEL_SCENARIO_HPP_
