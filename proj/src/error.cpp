#include "patchrank/error.hpp"

namespace patchrank {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kDanglingNode: return "DanglingNode";
    case ErrorCode::kEmptySnapshotSet: return "EmptySnapshotSet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicatePatchId: return "DuplicatePatchId";
    case ErrorCode::kInvalidSusp: return "InvalidSusp";
    case ErrorCode::kInvalidTestName: return "InvalidTestName";
    case ErrorCode::kMissingInputCsv: return "MissingInputCsv";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kMalformedManifest: return "MalformedManifest";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kMissingSnapshotFile: return "MissingSnapshotFile";
    case ErrorCode::kMissingFailingTests: return "MissingFailingTests";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kInsufficientLeaves: return "InsufficientLeaves";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace patchrank
