#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace matchfn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated invariant. Carries the 1-based source row
/// (header = row 1) when the error came from tabular input.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
      : Error(what), row_(row) {}

  std::optional<std::size_t> row() const noexcept { return row_; }

private:
  std::optional<std::size_t> row_;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Every kernel weight underflowed at an evaluation point.
class NoLocalSupportError : public Error {
public:
  using Error::Error;
};

/// Coordinate descent ran out of sweeps before meeting its KKT tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_objective)
      : Error(what), last_objective_(last_objective) {}

  double last_objective() const noexcept { return last_objective_; }

private:
  double last_objective_;
};

}  // namespace matchfn
