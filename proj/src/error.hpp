#pragma once

#include <stdexcept>
#include <string>

namespace uinfer {

// Codes double as CLI exit codes (invalid_input -> 2, everything else -> 1)
// and as C API status values.
enum class ErrorCode : int {
  runtime = 1,
  invalid_input = 2,
  degenerate_statistic = 3,
  not_implemented = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::invalid_input, msg);
}
[[noreturn]] inline void throw_runtime(const std::string& msg) {
  throw Error(ErrorCode::runtime, msg);
}
[[noreturn]] inline void throw_degenerate(const std::string& msg) {
  throw Error(ErrorCode::degenerate_statistic, msg);
}
[[noreturn]] inline void throw_unsupported(const std::string& msg) {
  throw Error(ErrorCode::not_implemented, msg);
}

}  // namespace uinfer
