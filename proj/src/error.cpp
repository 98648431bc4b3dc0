#include "renyi_fs/error.hpp"

namespace renyi_fs {

const char *to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MaxSamplesBelowClassCount: return "MaxSamplesBelowClassCount";
    case ErrorCode::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::NoRemainingFeatures: return "NoRemainingFeatures";
    case ErrorCode::InvalidPermutationCount: return "InvalidPermutationCount";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyFeatureSubset: return "EmptyFeatureSubset";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidReport: return "InvalidReport";
  }
  return "Unknown";
}

}  // namespace renyi_fs
