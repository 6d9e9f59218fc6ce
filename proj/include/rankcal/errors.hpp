#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankcal {

/// Malformed or inconsistent input data (shapes, ranges, file contents).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model or algorithm parameter outside its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyHistogram : public std::runtime_error {
 public:
  EmptyHistogram() : std::runtime_error("histogram has no cases") {}
};

class InsufficientPoints : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough preceding days to fit the rolling training window.
class InsufficientHistory : public std::runtime_error {
 public:
  InsufficientHistory(std::size_t required, std::size_t available)
      : std::runtime_error("insufficient history: need " + std::to_string(required) +
                           " preceding days, have " + std::to_string(available)),
        required_(required),
        available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// File parse failure; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rankcal
