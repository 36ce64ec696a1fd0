#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maxent {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimension mismatch, bad range...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The chain has no unique stationary distribution.
class NotIrreducible : public Error {
 public:
  using Error::Error;
};

/// The requested autocorrelation lies outside (or on the edge of) the attainable range.
class InfeasibleTarget : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its tolerance; carries the best residual seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// The analytic machinery does not cover this case (e.g. K != 2 closed forms).
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid input data. `line` is 1-based, 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace maxent
