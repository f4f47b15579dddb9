#include "ttl/error.hpp"

namespace ttl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kGridAlignment: return "grid-alignment";
    case ErrorKind::kNoSegment: return "no-segment";
    case ErrorKind::kUnsupportedAssumption: return "unsupported-assumption";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kUndefinedBound: return "undefined-bound";
    case ErrorKind::kGuard: return "guard";
    case ErrorKind::kMissingData: return "missing-data";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kCollision: return "collision";
    case ErrorKind::kTrainingFailed: return "training-failed";
  }
  return "unknown";
}

void require(bool cond, const std::string& message) {
  if (!cond) throw Error(ErrorKind::kValidation, message);
}

}  // namespace ttl
