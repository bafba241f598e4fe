#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace texscope {

enum class ErrorCode {
  InvalidArgument,
  NoMainFile,
  UnbalancedBraces,
  IndexOutOfRange,
  OverlappingMaximalComments,
  OracleBudgetExceeded,
  NoAuthorBlock,
  MissingInput,
  RepeatedInput,
  EmptyCorpus,
  FilterMismatch,
  DegenerateX,
  SingleClass,
  DegenerateFeature,
  ShapeMismatch,
  EmptyTestSet,
  Divergence,
  HttpError,
  FeedParseError,
  RateLimited,
  UnknownPayload,
  ArchiveCorrupt,
  PathTraversal,
  SizeCapExceeded,
  IoError,
  CorruptMeta,
  MissingTimestamp,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoMainFile: return "NoMainFile";
    case ErrorCode::UnbalancedBraces: return "UnbalancedBraces";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OverlappingMaximalComments: return "OverlappingMaximalComments";
    case ErrorCode::OracleBudgetExceeded: return "OracleBudgetExceeded";
    case ErrorCode::NoAuthorBlock: return "NoAuthorBlock";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::RepeatedInput: return "RepeatedInput";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::FilterMismatch: return "FilterMismatch";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::FeedParseError: return "FeedParseError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::UnknownPayload: return "UnknownPayload";
    case ErrorCode::ArchiveCorrupt: return "ArchiveCorrupt";
    case ErrorCode::PathTraversal: return "PathTraversal";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptMeta: return "CorruptMeta";
    case ErrorCode::MissingTimestamp: return "MissingTimestamp";
  }
  return "Unknown";
}

// Base exception for every hard failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A soft failure: recorded alongside a result instead of aborting it.
struct Diagnostic {
  ErrorCode code;
  std::string message;

  std::string to_string() const { return std::string(texscope::to_string(code)) + ": " + message; }

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace texscope
