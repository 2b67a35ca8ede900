#pragma once

#include <stdexcept>
#include <string>

namespace dgpc {

/// Machine-readable failure categories; the CLI maps them onto exit codes.
enum class ErrorCategory {
  Config = 2,
  DegenerateMeasure = 3,
  MissingMoment = 4,
  NonFinite = 5,
  NonIntegrable = 6,
  Io = 7,
  InvalidArgument = 8,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// A moment table describes a (near-)deterministic direction or is inconsistent.
class DegenerateMeasure : public Error {
 public:
  explicit DegenerateMeasure(const std::string& what)
      : Error(ErrorCategory::DegenerateMeasure, what) {}
};

class MissingMoment : public Error {
 public:
  explicit MissingMoment(const std::string& what)
      : Error(ErrorCategory::MissingMoment, what) {}
};

class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what)
      : Error(ErrorCategory::NonFinite, what) {}
};

class NonIntegrable : public Error {
 public:
  explicit NonIntegrable(const std::string& what)
      : Error(ErrorCategory::NonIntegrable, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCategory::InvalidArgument, what) {}
};

}  // namespace dgpc

namespace dgpc {

/// Re-throws `e` as the same category with `context` prefixed to the message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace dgpc
