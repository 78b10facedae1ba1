#pragma once

#include <stdexcept>
#include <string>

namespace tdr {

// Bad or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation was called outside its documented domain.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A required singular-value gap is absent; caller usually retries with a
// longer word.
struct GapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: a required quantity left the representable range.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tdr
