#pragma once

#include <stdexcept>
#include <string>

namespace lde {

/// Input violates an operation's precondition (bad parameters, bad geometry, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce its result (no root, blow-up, bracket failure).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoRealRootsError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class BracketError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace lde
