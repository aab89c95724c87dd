#include "htk/error.hpp"

namespace htk {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::UnknownMainSymbol: return "UnknownMainSymbol";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::DanglingMixtureParent: return "DanglingMixtureParent";
    case ErrorCode::LabelNotInTaxonomy: return "LabelNotInTaxonomy";
    case ErrorCode::MixtureNotAllowed: return "MixtureNotAllowed";
    case ErrorCode::InfeasibleHierarchy: return "InfeasibleHierarchy";
    case ErrorCode::SingularStep: return "SingularStep";
    case ErrorCode::ParentNotEmbedded: return "ParentNotEmbedded";
    case ErrorCode::SameMainSymbol: return "SameMainSymbol";
    case ErrorCode::EmptyRetainedSet: return "EmptyRetainedSet";
    case ErrorCode::OverrideTargetNotRetained: return "OverrideTargetNotRetained";
    case ErrorCode::OverrideSourceRetained: return "OverrideSourceRetained";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::NoTerminator: return "NoTerminator";
    case ErrorCode::DepthOutOfRange: return "DepthOutOfRange";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeLoss: return "NegativeLoss";
    case ErrorCode::NonPositiveEpochCount: return "NonPositiveEpochCount";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::TooFewRecords: return "TooFewRecords";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InfeasibleHierarchy:
    case ErrorCode::SingularStep:
    case ErrorCode::EmptyRetainedSet:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LabelMismatch:
      return 3;
    case ErrorCode::InvalidConfig:
    case ErrorCode::Io:
      return 2;
    default:
      return 1;
  }
}

}  // namespace htk
