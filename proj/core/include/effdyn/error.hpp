#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace effdyn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation failures. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ConstraintError : public InputError {
 public:
  using InputError::InputError;
};

class AssignmentError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyOutputError : public InputError {
 public:
  using InputError::InputError;
};

class ReversibilityRequired : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateFamilyError : public InputError {
 public:
  using InputError::InputError;
};

class SimulationBlowup : public Error {
 public:
  SimulationBlowup(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class TruncationError : public Error {
 public:
  TruncationError(std::size_t row, const std::string& what)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DisconnectedStateError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity broke one of its numerical invariants (exit code 3).
class InvariantFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace effdyn
