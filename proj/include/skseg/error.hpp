#pragma once

#include <stdexcept>
#include <string>

namespace skseg {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kIo,
  kNumeric,
  kConfig,
};

// Every failure raised by the core carries a category so the C API can map
// it onto a status code without string matching.
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

}  // namespace skseg
