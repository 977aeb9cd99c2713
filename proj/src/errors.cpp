#include "tsopt/errors.hpp"

namespace tsopt {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::not_psd: return "not_psd";
    case ErrorKind::singular_matrix: return "singular_matrix";
    case ErrorKind::singular_system: return "singular_system";
    case ErrorKind::numerical_failure: return "numerical_failure";
    case ErrorKind::unsupported_size: return "unsupported_size";
    case ErrorKind::diverged: return "diverged";
    case ErrorKind::weight_overflow: return "weight_overflow";
    case ErrorKind::insufficient_foreign: return "insufficient_foreign";
    case ErrorKind::invalid_distribution: return "invalid_distribution";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io_error: return "io_error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

}  // namespace tsopt
