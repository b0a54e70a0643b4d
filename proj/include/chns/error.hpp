#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chns {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: grid mismatch, bad parameter ranges.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (e.g. the logarithmic potential
// evaluated outside [-1, 1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative or nonlinear solver did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-fatal diagnostics. The default handler writes to stderr.
using WarningHandler = std::function<void(std::string_view)>;
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace chns
