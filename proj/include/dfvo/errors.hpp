#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dfvo {

// Every failure the library can surface, in one enum so the CLI can map
// codes to exit categories and tests can assert on exact codes.
enum class ErrorCode {
  // geometry / camera
  DegenerateDepth,
  NonRotation,
  BadCalibration,
  // raster file formats
  BadMagic,
  TruncatedFile,
  BadHeader,
  NegativeDepth,
  BadLineLength,
  IoFailure,
  // flow matching
  SizeMismatch,
  TooFewMatches,
  EmptyFlow,
  // epipolar / pnp solvers
  DegenerateConfiguration,
  AmbiguousCheirality,
  ZeroBaseline,
  TooFewCorrespondences,
  // scale recovery
  TooFewValidPairs,
  ScaleConsensusFailure,
  // tracker
  MissingFrameProduct,
  // trajectory evaluation
  LengthMismatch,
  DegenerateGeometry,
  SequenceTooShort,
  // config / cli
  InvalidConfig,
  UnknownKey,
  BadArguments,
};

std::string_view to_string(ErrorCode code);

// Exit category for the CLI: file-level failures are I/O errors (exit 2),
// everything else is a validation error (exit 1).
bool is_io_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace dfvo
