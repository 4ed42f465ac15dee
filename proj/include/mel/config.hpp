#ifndef MEL_CONFIG_HPP_
#define MEL_CONFIG_HPP_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "mel/scenario.hpp"

namespace mel {

struct SweepSpec {
  std::vector<int> k_list = {5, 10, 15, 20};
  std::vector<double> t_list = {7.5, 15.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<std::string> schemes = {"ha", "hu", "sync"};
};

struct SimSpec {
  int dimension = 8;
  int cycles = 30;
  double eta_scale = 0.1;  // step size = eta_scale / beta
  bool identical_learners = false;
};

struct Config {
  ScenarioSpec scenario;
  SweepSpec sweep;
  SimSpec sim;
  int oracle_tau_cap = 20;
};

// Flat `key = value` text with dotted keys; `#` starts a comment. Lists are
// comma separated. Unknown keys are errors.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

}  // namespace mel

#endif  // MEL_CONFIG_HPP_
