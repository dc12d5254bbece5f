#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glaucofuse {

enum class ErrorKind {
  // data errors
  EmptyImage,
  UnknownLabelValue,
  EmptyDisc,
  EmptyRegion,
  CoordOutOfBounds,
  DimensionMismatch,
  ChannelCountMismatch,
  UnsortedMilestones,
  MissingFile,
  MalformedRow,
  UnknownLabel,
  UnknownSplit,
  EmptySplit,
  SingleClassData,
  NoPositives,
  NoNegatives,
  CheckpointMismatch,
  Io,
  // usage errors
  NonPositiveT,
  InvalidConfig,
  Usage,
  // numeric failures
  NumericFailure,
};

/// Process exit status for each error family.
enum class ExitCode : int { Ok = 0, Usage = 1, Data = 2, Numeric = 3 };

std::string_view to_string(ErrorKind kind);
ExitCode exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace glaucofuse
