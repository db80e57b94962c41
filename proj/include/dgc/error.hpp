#pragma once

#include <stdexcept>
#include <string>

namespace dgc {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Too few sampled pairs/triplets to estimate the sample energies.
class InsufficientSampling : public Error {
 public:
  using Error::Error;
};

/// A realization could not reach the residual tolerance within the retry budget.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, int realization, double residual)
      : Error(what), realization_(realization), residual_(residual) {}

  int realization() const noexcept { return realization_; }
  double residual() const noexcept { return residual_; }

 private:
  int realization_;
  double residual_;
};

/// Raster text could not be parsed; line/column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dgc
