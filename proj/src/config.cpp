#include "mel/config.hpp"

#include <cstddef>
#include <fstream>
#include <sstream>

#include "mel/errors.hpp"

namespace mel {

namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

}  // namespace

Config parse_config(std::istream& in) {
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no), "empty key");
    }

    if (key == "scenario.num_learners") {
      cfg.scenario.num_learners = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.radius_m") {
      cfg.scenario.radius_m = parse_double(key, value);
    } else if (key == "scenario.node_bandwidth_hz") {
      cfg.scenario.node_bandwidth_hz = parse_double(key, value);
    } else if (key == "scenario.tx_power_dbm") {
      cfg.scenario.tx_power_dbm = parse_double(key, value);
    } else if (key == "scenario.noise_psd_dbm_hz") {
      cfg.scenario.noise_psd_dbm_hz = parse_double(key, value);
    } else if (key == "scenario.clock_pool_hz") {
      cfg.scenario.clock_pool_hz.clear();
      for (const std::string& item : split_list(value)) {
        cfg.scenario.clock_pool_hz.push_back(parse_double(key, item));
      }
      if (cfg.scenario.clock_pool_hz.empty()) {
        throw ConfigError(key, "needs at least one clock rate");
      }
    } else if (key == "scenario.cycle_budget_s") {
      cfg.scenario.cycle_budget_s = parse_double(key, value);
    } else if (key == "scenario.batch_lower") {
      cfg.scenario.batch_lower = parse_int(key, value);
    } else if (key == "scenario.batch_upper") {
      cfg.scenario.batch_upper = parse_int(key, value);
    } else if (key == "scenario.mode") {
      if (value == "PL") {
        cfg.scenario.mode = LearningMode::kParallelized;
      } else if (value == "FL") {
        cfg.scenario.mode = LearningMode::kFederated;
      } else {
        throw ConfigError(key, "expected PL or FL, got '" + value + "'");
      }
    } else if (key == "scenario.seed") {
      cfg.scenario.seed = parse_uint(key, value);
    } else if (key == "task.features") {
      cfg.scenario.task.features = parse_int(key, value);
    } else if (key == "task.data_precision_bits") {
      cfg.scenario.task.data_precision_bits = parse_double(key, value);
    } else if (key == "task.model_precision_bits") {
      cfg.scenario.task.model_precision_bits = parse_double(key, value);
    } else if (key == "task.model_size_slope") {
      cfg.scenario.task.model_size_slope = parse_double(key, value);
    } else if (key == "task.model_size_intercept") {
      cfg.scenario.task.model_size_intercept = parse_double(key, value);
    } else if (key == "task.complexity_cycles_per_sample") {
      cfg.scenario.task.complexity_cycles_per_sample = parse_double(key, value);
    } else if (key == "task.dataset_size") {
      cfg.scenario.task.dataset_size = parse_int(key, value);
    } else if (key == "sweep.k_list") {
      cfg.sweep.k_list.clear();
      for (const std::string& item : split_list(value)) {
        cfg.sweep.k_list.push_back(static_cast<int>(parse_int(key, item)));
      }
    } else if (key == "sweep.t_list") {
      cfg.sweep.t_list.clear();
      for (const std::string& item : split_list(value)) {
        cfg.sweep.t_list.push_back(parse_double(key, item));
      }
    } else if (key == "sweep.seeds") {
      cfg.sweep.seeds.clear();
      for (const std::string& item : split_list(value)) {
        cfg.sweep.seeds.push_back(parse_uint(key, item));
      }
    } else if (key == "sweep.schemes") {
      cfg.sweep.schemes = split_list(value);
    } else if (key == "oracle.tau_cap") {
      cfg.oracle_tau_cap = static_cast<int>(parse_int(key, value));
    } else if (key == "sim.dimension") {
      cfg.sim.dimension = static_cast<int>(parse_int(key, value));
    } else if (key == "sim.cycles") {
      cfg.sim.cycles = static_cast<int>(parse_int(key, value));
    } else if (key == "sim.eta_scale") {
      cfg.sim.eta_scale = parse_double(key, value);
    } else if (key == "sim.identical_learners") {
      cfg.sim.identical_learners = parse_bool(key, value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path, "cannot open config file");
  }
  return parse_config(in);
}

}  // namespace mel
