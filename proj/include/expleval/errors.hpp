#pragma once

#include <stdexcept>
#include <string>

namespace expleval {

/// Input outside a documented domain (bad score, malformed document, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not permitted in the current state (wrong phase, duplicate answer).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Referenced entity does not exist.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data loading or persistence failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough data to compute the requested result.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace expleval
