#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rkstab {

enum class ErrorCode {
    NotExplicit,
    DimensionMismatch,
    ZeroParameter,
    Inconsistent,
    InvalidTableau,
    InvalidDegree,
    InvalidArgument,
    NoConvergence,
    SingularSystem,
    DegenerateDenominator,
    InfeasibleTarget,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotExplicit: return "NotExplicit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroParameter: return "ZeroParameter";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::InvalidTableau: return "InvalidTableau";
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Precondition or contract violation raised by any rkstab operation.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rkstab
