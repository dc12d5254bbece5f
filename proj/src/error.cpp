#include "glaucofuse/error.hpp"

namespace glaucofuse {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyImage: return "EmptyImage";
    case ErrorKind::UnknownLabelValue: return "UnknownLabelValue";
    case ErrorKind::EmptyDisc: return "EmptyDisc";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::CoordOutOfBounds: return "CoordOutOfBounds";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ChannelCountMismatch: return "ChannelCountMismatch";
    case ErrorKind::UnsortedMilestones: return "UnsortedMilestones";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::UnknownSplit: return "UnknownSplit";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::SingleClassData: return "SingleClassData";
    case ErrorKind::NoPositives: return "NoPositives";
    case ErrorKind::NoNegatives: return "NoNegatives";
    case ErrorKind::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NonPositiveT: return "NonPositiveT";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveT:
    case ErrorKind::InvalidConfig:
    case ErrorKind::Usage:
      return ExitCode::Usage;
    case ErrorKind::NumericFailure:
      return ExitCode::Numeric;
    default:
      return ExitCode::Data;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace glaucofuse
