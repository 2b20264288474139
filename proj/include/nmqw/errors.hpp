#pragma once

#include <stdexcept>
#include <string>

namespace nmqw {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or subsystem splits that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameters outside a model's declared domain (negative rates, t < 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Kernel vanishes where an inverse dynamical map is required.
class NonInvertibleMapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Eigensolver or optimiser did not converge.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Walker amplitude reached the edge of the truncated lattice.
class EdgeAmplitudeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Experiment configuration rejected (schema or range).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data file; carries the offending line number.
class CsvError : public Error {
 public:
  CsvError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmqw
