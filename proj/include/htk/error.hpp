#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace htk {

enum class ErrorCode {
  // label grammar
  MalformedLabel,
  UnknownMainSymbol,
  // taxonomy
  DuplicateLabel,
  DanglingMixtureParent,
  LabelNotInTaxonomy,
  MixtureNotAllowed,
  // embeddings
  InfeasibleHierarchy,
  SingularStep,
  ParentNotEmbedded,
  SameMainSymbol,
  // clustering
  EmptyRetainedSet,
  OverrideTargetNotRetained,
  OverrideSourceRetained,
  // decoding
  ZeroVector,
  DimensionMismatch,
  LabelMismatch,
  KOutOfRange,
  // metrics
  NonMonotone,
  NoTerminator,
  DepthOutOfRange,
  EmptySampleSet,
  UnknownLabel,
  LengthMismatch,
  NegativeLoss,
  NonPositiveEpochCount,
  // data generation / splitting
  InvalidConfig,
  EmptyTrainingSet,
  TooFewRecords,
  // plumbing
  MalformedRecord,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exit-status class of an error as used by the command-line front end:
/// 1 for bad input data, 2 for IO/config problems, 3 for mathematical
/// infeasibility.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace htk
