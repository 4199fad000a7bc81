#pragma once

#include <stdexcept>
#include <string>

namespace hypt {

enum class ErrorCode {
  kInvalidArgument = 1,
  kOutOfRange = 2,
  kUnknownMap = 3,
  kNotConverged = 4,
  kInternal = 5,
};

// Every failure raised by the core carries a code that maps 1:1 onto the
// status values of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace hypt
