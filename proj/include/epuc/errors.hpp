#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epuc {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor, label or partition dimensions are unusable.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A probability row left the simplex beyond tolerance.
class SimplexError : public Error {
 public:
  SimplexError(std::size_t input, std::size_t pass, double row_sum, const std::string& what)
      : Error(what), input_(input), pass_(pass), row_sum_(row_sum) {}

  std::size_t input() const noexcept { return input_; }
  std::size_t pass() const noexcept { return pass_; }
  double row_sum() const noexcept { return row_sum_; }

 private:
  std::size_t input_;
  std::size_t pass_;
  double row_sum_;
};

/// Bad label values or partitions.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries a line (JSONL) or byte offset (binary).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position) : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace epuc
