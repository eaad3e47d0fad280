#pragma once

#include <stdexcept>
#include <string>

namespace hcantor {

enum class ErrorCode {
  InvalidArgument = 1,
  StepLimitExceeded,
  DiscardLimitExceeded,
  UndefinedConditional,
  InsufficientCounts,
  DepthMismatch,
  CostGuard,
  Io,
};

// Base class for every error raised by the library. The code maps 1:1 onto
// the status values of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace hcantor
