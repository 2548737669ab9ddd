#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qshift {

enum class ErrorCode {
  // input parsing
  Io,
  MalformedLine,
  DuplicateId,
  DuplicatePair,
  NegativeRelevance,
  DuplicateDocForQuery,
  NonContiguousRanks,
  NonMonotonicScores,
  InconsistentRunTag,
  BadMagic,
  UnsupportedVersion,
  SizeMismatch,
  IdCountMismatch,
  // shift construction
  EmptyInput,
  KTooLarge,
  MTooLarge,
  TestSizeTooLarge,
  TooFewClusters,
  InvalidManifest,
  // bm25
  EmptyCollection,
  // metrics / statistics
  NoPositives,
  LengthMismatch,
  TooFewSamples,
  // harness
  MissingRun,
  MissingQrels,
  NonSquareMatrix,
  ZeroAvgIn,
  // indicators
  EmptyVocabulary,
  UnknownId,
  ClusterMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` identifies the condition;
/// `line()` is set for errors tied to a line of an input file (1-based).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
};

}  // namespace qshift
