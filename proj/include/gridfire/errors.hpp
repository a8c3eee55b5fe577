#pragma once

#include <stdexcept>
#include <string>

namespace gridfire {

/// Machine-checkable failure categories. Every validation path raises
/// exactly one of these so callers (and fixtures) can distinguish them.
enum class ErrorCode {
    ParseError,
    DuplicateBus,
    MissingReference,
    MultipleReference,
    CycleDetected,
    DisconnectedBus,
    MultipleParents,
    UnknownBus,
    InvalidParameter,
    InvalidDistribution,
    LogDomain,
    TooFewRows,
    RankDeficient,
    DimensionMismatch,
    InvalidMode,
    IntegrationFailure,
    UnfittedModel,
    NumericalFailure,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "parse error";
        case ErrorCode::DuplicateBus: return "duplicate bus id";
        case ErrorCode::MissingReference: return "missing reference bus";
        case ErrorCode::MultipleReference: return "multiple reference buses";
        case ErrorCode::CycleDetected: return "cycle detected";
        case ErrorCode::DisconnectedBus: return "disconnected bus";
        case ErrorCode::MultipleParents: return "multiple parents";
        case ErrorCode::UnknownBus: return "unknown bus id";
        case ErrorCode::InvalidParameter: return "invalid parameter";
        case ErrorCode::InvalidDistribution: return "invalid distribution";
        case ErrorCode::LogDomain: return "log domain";
        case ErrorCode::TooFewRows: return "too few rows";
        case ErrorCode::RankDeficient: return "rank deficient";
        case ErrorCode::DimensionMismatch: return "dimension mismatch";
        case ErrorCode::InvalidMode: return "invalid mode";
        case ErrorCode::IntegrationFailure: return "integration failure";
        case ErrorCode::UnfittedModel: return "unfitted model";
        case ErrorCode::NumericalFailure: return "numerical failure";
        case ErrorCode::IoError: return "io error";
    }
    return "unknown error";
}

}  // namespace gridfire
