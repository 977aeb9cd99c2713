#pragma once

#include <stdexcept>
#include <string>

namespace tsopt {

enum class ErrorKind {
  dimension_mismatch,
  not_psd,
  singular_matrix,
  singular_system,
  numerical_failure,
  unsupported_size,
  diverged,
  weight_overflow,
  insufficient_foreign,
  invalid_distribution,
  invalid_argument,
  io_error,
};

const char* to_string(ErrorKind k);

// Every failure the library raises carries a machine-checkable kind, so
// callers (and the CLI exit-code mapping) never have to match on strings.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg);
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

void require(bool cond, ErrorKind kind, const std::string& msg);

}  // namespace tsopt
