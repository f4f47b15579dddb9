#pragma once

#include <stdexcept>
#include <string>

namespace ttl {

enum class ErrorKind {
  kValidation,
  kGridAlignment,
  kNoSegment,
  kUnsupportedAssumption,
  kDivergence,
  kUndefinedBound,
  kGuard,
  kMissingData,
  kParse,
  kCollision,
  kTrainingFailed,
};

const char* to_string(ErrorKind kind);

/// Base error for everything the library reports. Carries a category so the
/// CLI can map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws Error(kValidation, message) unless cond holds.
void require(bool cond, const std::string& message);

}  // namespace ttl
