#ifndef MEL_ERRORS_HPP_
#define MEL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mel {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidChannel : public Error {
 public:
  using Error::Error;
};

class InvalidDistance : public Error {
 public:
  using Error::Error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

class InvalidMultipliers : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

// A single learner cannot finish even the smallest batch within the budget.
class InfeasibleLearner : public Error {
 public:
  InfeasibleLearner(int learner_id, const std::string& what)
      : Error(what), learner_id_(learner_id) {}
  int learner_id() const { return learner_id_; }

 private:
  int learner_id_;
};

class InfeasibleProblem : public Error {
 public:
  using Error::Error;
};

class DegenerateMultiplier : public Error {
 public:
  using Error::Error;
};

class NoCertificate : public Error {
 public:
  using Error::Error;
};

// Configuration parse/validation failure; `key` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace mel

#endif  // MEL_ERRORS_HPP_
