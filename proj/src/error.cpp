#include "semsteer/error.hpp"

namespace semsteer {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::InsufficientInteraction: return "insufficient-interaction";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::ConcurrentUpdate: return "concurrent-update";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::InconsistentWidth: return "inconsistent-width";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::Integrity: return "integrity-error";
    case ErrorCode::Migration: return "migration-error";
  }
  return "unknown";
}

}  // namespace semsteer
