#include "dgpc/errors.hpp"

namespace dgpc {

const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::DegenerateMeasure: return "degenerate_measure";
    case ErrorCategory::MissingMoment: return "missing_moment";
    case ErrorCategory::NonFinite: return "non_finite";
    case ErrorCategory::NonIntegrable: return "non_integrable";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace dgpc

namespace dgpc {

void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.category()) {
    case ErrorCategory::Config: throw ConfigError(msg);
    case ErrorCategory::DegenerateMeasure: throw DegenerateMeasure(msg);
    case ErrorCategory::MissingMoment: throw MissingMoment(msg);
    case ErrorCategory::NonFinite: throw NonFinite(msg);
    case ErrorCategory::NonIntegrable: throw NonIntegrable(msg);
    case ErrorCategory::Io: throw IoError(msg);
    case ErrorCategory::InvalidArgument: throw InvalidArgument(msg);
  }
  throw Error(e.category(), msg);
}

}  // namespace dgpc
