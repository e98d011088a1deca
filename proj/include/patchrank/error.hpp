#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patchrank {

enum class ErrorCode {
  // snapshot codec
  kMalformedDocument,
  kUnsupportedVersion,
  kInvariantViolation,
  // distance
  kDanglingNode,
  kEmptySnapshotSet,
  // ranking
  kLengthMismatch,
  // corpus
  kMalformedRow,
  kDuplicatePatchId,
  kInvalidSusp,
  kInvalidTestName,
  kMissingInputCsv,
  kMissingManifest,
  kMalformedManifest,
  kManifestMismatch,
  kMissingSnapshotFile,
  kMissingFailingTests,
  // synthgen
  kInvalidParams,
  kInsufficientLeaves,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every recoverable failure in the library. The
/// code is what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace patchrank
