#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shiftconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or value violates an operation's preconditions.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Valid convolution asked for more frames than the input provides.
class WindowUnderflowError : public Error {
 public:
  using Error::Error;
};

// The engine's cached activations were computed under older weights.
class StaleCacheError : public Error {
 public:
  using Error::Error;
};

// A stack geometry whose deepest layers would have fewer than one frame.
class InfeasibleStackError : public Error {
 public:
  using Error::Error;
};

// Train/validation/test partition cannot be formed (empty subset, bad fractions).
class InvalidSplitError : public Error {
 public:
  using Error::Error;
};

// Malformed model or data file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string& msg, std::size_t epoch)
      : Error(msg), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace shiftconv
