#pragma once

#include <stdexcept>
#include <string>

namespace bms {

enum class ErrorCode {
    SchemaViolation,
    BadRational,
    DimensionMismatch,
    UnboundedSafetySet,
    EmptySafetySet,
    StartOutsideSafety,
    PointOutsidePolytope,
    StartOnExcludedBoundary,
    EmptyClause,
    NoModeWithinBudget,
    UnknownMode,
    BadPolicySpec,
    BadDelta,
    NotSchedulable,
    Internal,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::BadRational: return "BadRational";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnboundedSafetySet: return "UnboundedSafetySet";
        case ErrorCode::EmptySafetySet: return "EmptySafetySet";
        case ErrorCode::StartOutsideSafety: return "StartOutsideSafety";
        case ErrorCode::PointOutsidePolytope: return "PointOutsidePolytope";
        case ErrorCode::StartOnExcludedBoundary: return "StartOnExcludedBoundary";
        case ErrorCode::EmptyClause: return "EmptyClause";
        case ErrorCode::NoModeWithinBudget: return "NoModeWithinBudget";
        case ErrorCode::UnknownMode: return "UnknownMode";
        case ErrorCode::BadPolicySpec: return "BadPolicySpec";
        case ErrorCode::BadDelta: return "BadDelta";
        case ErrorCode::NotSchedulable: return "NotSchedulable";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace bms
