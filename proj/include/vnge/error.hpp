#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vnge {

enum class ErrorCode {
  SelfLoop,
  NegativeWeight,
  DuplicateEdge,
  VertexOutOfRange,
  InvalidArgument,
  ParseError,
  IoError,
  EmptyGraph,
  TooLargeForDense,
  NotPositiveSemidefinite,
  NoConvergence,
  DomainError,
  EmptyTrainingSet,
  MissingEstimator,
  SizeMismatch,
  InvalidSpec,
};

// Broad class of a failure; the CLI maps this onto its exit code.
enum class ErrorClass { Data, Numerical };

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::TooLargeForDense: return "TooLargeForDense";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::MissingEstimator: return "MissingEstimator";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  ErrorClass error_class() const noexcept {
    return code_ == ErrorCode::NoConvergence ? ErrorClass::Numerical : ErrorClass::Data;
  }

 private:
  ErrorCode code_;
};

}  // namespace vnge
