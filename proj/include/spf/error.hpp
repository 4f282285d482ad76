#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spf {

enum class ErrorCode {
  kIo,
  kMalformedRow,
  kDuplicateId,
  kScoreOutOfRange,
  kUnknownId,
  kPinExcludeConflict,
  kUnknownAttribute,
  kInvalidSpec,
  kCandidateAlreadyPresent,
  kPoolTooSmall,
  kBudgetExceeded,
  kEmptyFrontier,
  kSizeMismatch,
  kInvalidConfig,
  kMalformedRequest,
};

// Stable, machine-readable name used by the CLI and the HTTP API.
std::string_view category_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view category() const { return category_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace spf
