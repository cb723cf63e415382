#pragma once

#include <stdexcept>
#include <string>

namespace vpb {

enum class ErrorKind {
  domain,
  no_solution,
  convergence,
  nonphysical_moments,
  not_microscopic,
  positivity,
  stability,
  neutrality,
  boundary_reached,
  nonpositive_series,
  parse,
  validation,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

  // Config errors map to exit code 2, everything else to 1.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::parse || kind_ == ErrorKind::validation;
  }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

class NoSolution : public Error {
 public:
  explicit NoSolution(const std::string& w) : Error(ErrorKind::no_solution, w) {}
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& w, double residual = 0.0)
      : Error(ErrorKind::convergence, w), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NonphysicalMoments : public Error {
 public:
  explicit NonphysicalMoments(const std::string& w) : Error(ErrorKind::nonphysical_moments, w) {}
};

class NotMicroscopic : public Error {
 public:
  explicit NotMicroscopic(const std::string& w) : Error(ErrorKind::not_microscopic, w) {}
};

class PositivityViolation : public Error {
 public:
  explicit PositivityViolation(const std::string& w) : Error(ErrorKind::positivity, w) {}
};

class StabilityViolation : public Error {
 public:
  explicit StabilityViolation(const std::string& w) : Error(ErrorKind::stability, w) {}
};

class NeutralityViolated : public Error {
 public:
  explicit NeutralityViolated(const std::string& w) : Error(ErrorKind::neutrality, w) {}
};

class BoundaryReached : public Error {
 public:
  explicit BoundaryReached(const std::string& w) : Error(ErrorKind::boundary_reached, w) {}
};

class NonPositiveSeries : public Error {
 public:
  explicit NonPositiveSeries(const std::string& w) : Error(ErrorKind::nonpositive_series, w) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& w, int line, int column)
      : Error(ErrorKind::parse, w), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& key, const std::string& w)
      : Error(ErrorKind::validation, w), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

}  // namespace vpb
