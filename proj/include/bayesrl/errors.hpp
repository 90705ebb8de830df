#pragma once

#include <stdexcept>
#include <string>

namespace bayesrl {

/// State or action index outside the model's range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Object used in a state that does not permit the call (e.g. sampling an
/// unnormalized posterior).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Factorization failure, singular system or non-finite intermediate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Invalid experiment configuration; raised before any run starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File output failure, carries the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bayesrl
