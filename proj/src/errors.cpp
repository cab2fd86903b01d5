#include "dfvo/errors.hpp"

namespace dfvo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDepth: return "DegenerateDepth";
    case ErrorCode::NonRotation: return "NonRotation";
    case ErrorCode::BadCalibration: return "BadCalibration";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::NegativeDepth: return "NegativeDepth";
    case ErrorCode::BadLineLength: return "BadLineLength";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::TooFewMatches: return "TooFewMatches";
    case ErrorCode::EmptyFlow: return "EmptyFlow";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::AmbiguousCheirality: return "AmbiguousCheirality";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::TooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::TooFewValidPairs: return "TooFewValidPairs";
    case ErrorCode::ScaleConsensusFailure: return "ScaleConsensusFailure";
    case ErrorCode::MissingFrameProduct: return "MissingFrameProduct";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::BadArguments: return "BadArguments";
  }
  return "UnknownError";
}

bool is_io_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedFile:
    case ErrorCode::BadHeader:
    case ErrorCode::NegativeDepth:
    case ErrorCode::BadLineLength:
    case ErrorCode::IoFailure:
    case ErrorCode::NonRotation:
    case ErrorCode::BadCalibration:
    case ErrorCode::MissingFrameProduct:
      return true;
    default:
      return false;
  }
}

}  // namespace dfvo
