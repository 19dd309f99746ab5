#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipa {

// Malformed or inconsistent input: dimension mismatches, invalid descriptors,
// bad files. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration would exceed the configured cap.
class EnumerationLimitError : public InputError {
 public:
  using InputError::InputError;
};

// The iteration produced a non-finite iterate or a runaway residual.
// Maps to CLI exit code 2.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// The convergence condition beta <= 1/mu < 1.5 alpha cannot be certified.
// Maps to CLI exit code 3.
class ConditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ipa
