#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cauchyhull {

enum class ErrorCode {
    InvalidIsometry,
    NotParabolic,
    DegenerateFrame,
    PairingMismatch,
    NotUnimodular,
    UnknownGenerator,
    NotLightlike,
    Degenerate,
    NotStabilized,
    GluingMismatch,
    InconclusiveNearBoundary,
    BoundaryEdge,
    DegenerateTriangle,
    FlipLimitExceeded,
    UnknownVertex,
    InvalidSurface,
    NotCocyclic,
    OnOrOutsideCircumcircle,
    RelationResidualTooLarge,
    NotAdmissible,
    Mismatch,
    ParseError,
    SchemaError,
    VersionError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidIsometry: return "InvalidIsometry";
    case ErrorCode::NotParabolic: return "NotParabolic";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::PairingMismatch: return "PairingMismatch";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::UnknownGenerator: return "UnknownGenerator";
    case ErrorCode::NotLightlike: return "NotLightlike";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::GluingMismatch: return "GluingMismatch";
    case ErrorCode::InconclusiveNearBoundary: return "InconclusiveNearBoundary";
    case ErrorCode::BoundaryEdge: return "BoundaryEdge";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::FlipLimitExceeded: return "FlipLimitExceeded";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::InvalidSurface: return "InvalidSurface";
    case ErrorCode::NotCocyclic: return "NotCocyclic";
    case ErrorCode::OnOrOutsideCircumcircle: return "OnOrOutsideCircumcircle";
    case ErrorCode::RelationResidualTooLarge: return "RelationResidualTooLarge";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cauchyhull
