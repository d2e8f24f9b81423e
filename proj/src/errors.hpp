#pragma once

#include <stdexcept>
#include <string>

namespace trisplit {

enum class ErrorCode {
  Config,
  Dimension,
  NotSurjective,
  InvalidArgument,
  EmptyInterval,
  NumericalDivergence,
  AssumptionViolation,
  TooShort,
  NotConverged,
  GridTooLarge,
  Io,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string &m) : Error(ErrorCode::Dimension, m) {}
};

struct NotSurjectiveError : Error {
  explicit NotSurjectiveError(const std::string &m) : Error(ErrorCode::NotSurjective, m) {}
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string &m) : Error(ErrorCode::InvalidArgument, m) {}
};

struct EmptyIntervalError : Error {
  explicit EmptyIntervalError(const std::string &m) : Error(ErrorCode::EmptyInterval, m) {}
};

struct NumericalDivergenceError : Error {
  explicit NumericalDivergenceError(const std::string &m)
      : Error(ErrorCode::NumericalDivergence, m) {}
};

struct AssumptionViolationError : Error {
  explicit AssumptionViolationError(const std::string &m)
      : Error(ErrorCode::AssumptionViolation, m) {}
};

struct TooShortError : Error {
  explicit TooShortError(const std::string &m) : Error(ErrorCode::TooShort, m) {}
};

struct NotConvergedError : Error {
  explicit NotConvergedError(const std::string &m) : Error(ErrorCode::NotConverged, m) {}
};

struct GridTooLargeError : Error {
  explicit GridTooLargeError(const std::string &m) : Error(ErrorCode::GridTooLarge, m) {}
};

struct IoError : Error {
  explicit IoError(const std::string &m) : Error(ErrorCode::Io, m) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &m) : Error(ErrorCode::Config, m) {}
  ConfigError(const std::string &file, int line, const std::string &m)
      : Error(ErrorCode::Config, file + ":" + std::to_string(line) + ": " + m) {}
};

} // namespace trisplit
