#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semsteer {

enum class ErrorCode {
  InvalidInput,
  InsufficientInteraction,
  NotFound,
  ConcurrentUpdate,
  Divergence,
  Parse,
  InconsistentWidth,
  DuplicateId,
  Integrity,
  Migration,
};

// Machine-readable kebab-case name, e.g. "insufficient-interaction".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace semsteer
