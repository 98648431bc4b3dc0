#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace renyi_fs {

enum class ErrorCode {
  MissingFile,
  MissingLabelColumn,
  ParseError,
  EmptyDataset,
  MaxSamplesBelowClassCount,
  NonPositiveBandwidth,
  DimensionMismatch,
  EigensolverFailure,
  NegativeEigenvalue,
  InvalidAlpha,
  NoRemainingFeatures,
  InvalidPermutationCount,
  InvalidProbability,
  InvalidConfig,
  EmptyFeatureSubset,
  LengthMismatch,
  TooFewSamples,
  EmptyInput,
  InvalidReport,
};

const char *to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Cell-level CSV failure. row is the 1-based data row (header excluded), col
// the 0-based column in the file.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string &what)
      : Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " +
                                         std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace renyi_fs
