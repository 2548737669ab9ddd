#include "qshift/error.hpp"

namespace qshift {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::NegativeRelevance: return "NegativeRelevance";
    case ErrorCode::DuplicateDocForQuery: return "DuplicateDocForQuery";
    case ErrorCode::NonContiguousRanks: return "NonContiguousRanks";
    case ErrorCode::NonMonotonicScores: return "NonMonotonicScores";
    case ErrorCode::InconsistentRunTag: return "InconsistentRunTag";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::IdCountMismatch: return "IdCountMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::MTooLarge: return "MTooLarge";
    case ErrorCode::TestSizeTooLarge: return "TestSizeTooLarge";
    case ErrorCode::TooFewClusters: return "TooFewClusters";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::MissingQrels: return "MissingQrels";
    case ErrorCode::NonSquareMatrix: return "NonSquareMatrix";
    case ErrorCode::ZeroAvgIn: return "ZeroAvgIn";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::ClusterMismatch: return "ClusterMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail,
                    std::optional<std::size_t> line) {
  std::string msg(to_string(code));
  if (line) msg += " (line " + std::to_string(*line) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail,
             std::optional<std::size_t> line)
    : std::runtime_error(compose(code, detail, line)),
      code_(code),
      line_(line),
      detail_(detail) {}

}  // namespace qshift
