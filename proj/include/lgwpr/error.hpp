#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lgwpr {

enum class ErrorCode {
  invalid_argument = 1,
  io,
  parse,
  validation,
  singular_system,
  divergence,
  degrees_of_freedom,
  degenerate_null,
  fit_failure,
  selection_failure,
};

/// Base class of every exception thrown by the library. The code survives the
/// C boundary, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(ErrorCode::parse, what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::size_t row = npos)
      : Error(ErrorCode::validation, what), row_(row) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  /// Zero-based data row (header excluded), or npos when not row specific.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Necessary-condition check for existence of the Poisson ML estimator:
/// the design restricted to positive counts must have full column rank.
struct IdentificationReport {
  std::size_t n_positive = 0;
  std::size_t design_rank_on_positive = 0;
  std::size_t n_parameters = 0;
  bool identifiable_necessary = false;

  std::string describe() const;
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, IdentificationReport report)
      : Error(ErrorCode::singular_system, what), report_(report) {}
  const IdentificationReport& report() const noexcept { return report_; }

 private:
  IdentificationReport report_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(ErrorCode::divergence, what) {}
};

class DegreesOfFreedomError : public Error {
 public:
  explicit DegreesOfFreedomError(const std::string& what)
      : Error(ErrorCode::degrees_of_freedom, what) {}
};

class DegenerateNullError : public Error {
 public:
  explicit DegenerateNullError(const std::string& what)
      : Error(ErrorCode::degenerate_null, what) {}
};

class FitFailureError : public Error {
 public:
  explicit FitFailureError(const std::string& what)
      : Error(ErrorCode::fit_failure, what) {}
};

class SelectionFailureError : public Error {
 public:
  explicit SelectionFailureError(const std::string& what)
      : Error(ErrorCode::selection_failure, what) {}
};

}  // namespace lgwpr
