#pragma once

#include <stdexcept>
#include <string>

namespace percolab {

// Error taxonomy shared by the whole library.  Each condition that callers
// may want to branch on carries a distinct code; the CLI maps codes to
// process exit codes.
enum class ErrorCode {
    DimensionMismatch,
    NotAdjacent,
    NotAPath,
    KindMismatch,
    DomainExceeded,
    EmptyValueSet,
    MalformedInput,
    Unreachable,
    CapTooSmall,
    NoApproximant,
    EmptySet,
    NotInCone,
    DegeneratePolytope,
    PreconditionFailed,
    BoundaryTouchesInnerBall,
    NoRationalSplit,
    ConesOverlap,
    NoGridPath,
    ScaleMismatch,
    NormMismatch,
    RayContained,
    NotNegative,
    NoEvenPair,
    NoMargin,
    NotSPD,
    ParityMismatch,
    InvalidParams,
    UnsupportedDimension,
    VerificationFailed,
    InternalError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotAdjacent: return "NotAdjacent";
        case ErrorCode::NotAPath: return "NotAPath";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::DomainExceeded: return "DomainExceeded";
        case ErrorCode::EmptyValueSet: return "EmptyValueSet";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::CapTooSmall: return "CapTooSmall";
        case ErrorCode::NoApproximant: return "NoApproximant";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::NotInCone: return "NotInCone";
        case ErrorCode::DegeneratePolytope: return "DegeneratePolytope";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::BoundaryTouchesInnerBall: return "BoundaryTouchesInnerBall";
        case ErrorCode::NoRationalSplit: return "NoRationalSplit";
        case ErrorCode::ConesOverlap: return "ConesOverlap";
        case ErrorCode::NoGridPath: return "NoGridPath";
        case ErrorCode::ScaleMismatch: return "ScaleMismatch";
        case ErrorCode::NormMismatch: return "NormMismatch";
        case ErrorCode::RayContained: return "RayContained";
        case ErrorCode::NotNegative: return "NotNegative";
        case ErrorCode::NoEvenPair: return "NoEvenPair";
        case ErrorCode::NoMargin: return "NoMargin";
        case ErrorCode::NotSPD: return "NotSPD";
        case ErrorCode::ParityMismatch: return "ParityMismatch";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) raise(code, what);
}

}  // namespace percolab
